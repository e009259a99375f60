//! Brute-force reference reasoners for testing. Nothing here uses the
//! unification, ordering or inference code of the prover: clauses are
//! instantiated over an explicit universe and handed to a small DPLL solver.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::formula::Formula;
use crate::term::{Atom, Clause, Signature, Sym, SymbolKind, Term, Var};

/// Ground terms, independent of the prover's term type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GTerm {
    C(Sym),
    F(Sym, Vec<GTerm>),
}

/// Universe for Herbrand instantiation. Depth 0 means function-free.
#[derive(Clone, Debug)]
pub struct GroundUniverse {
    pub constants: Vec<Sym>,
    pub max_term_depth: usize,
}

impl GroundUniverse {
    /// Constants of `clauses`, padded with fresh constants up to `size`.
    pub fn for_clauses(sig: &mut Signature, clauses: &[Clause], size: usize, max_term_depth: usize) -> Self {
        let mut constants: BTreeSet<Sym> = BTreeSet::new();
        for c in clauses {
            for l in &c.literals {
                for t in &l.atom.args {
                    collect_constants(t, &mut constants);
                }
            }
        }
        let mut constants: Vec<Sym> = constants.into_iter().collect();
        let mut k = 0;
        while constants.len() < size.max(1) {
            let name = format!("pad{k}");
            k += 1;
            if let Ok(s) = sig.intern(&name, SymbolKind::Constant, 0) {
                if !constants.contains(&s) {
                    constants.push(s);
                }
            }
        }
        GroundUniverse {
            constants,
            max_term_depth,
        }
    }
}

fn collect_constants(t: &Term, out: &mut BTreeSet<Sym>) {
    match t {
        Term::Var(_) => {}
        Term::Const(c) => {
            out.insert(*c);
        }
        Term::App(_, args) => args.iter().for_each(|a| collect_constants(a, out)),
    }
}

fn collect_functions(t: &Term, out: &mut BTreeSet<(Sym, usize)>) {
    if let Term::App(f, args) = t {
        out.insert((*f, args.len()));
        args.iter().for_each(|a| collect_functions(a, out));
    }
}

fn gdepth(t: &GTerm) -> usize {
    match t {
        GTerm::C(_) => 0,
        GTerm::F(_, args) => 1 + args.iter().map(gdepth).max().unwrap_or(0),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("ground instantiation exceeds the cap of {0} literal occurrences")]
    TooLarge(usize),
}

/// Default cap on ground literal occurrences.
pub const GROUND_CAP: usize = 2_000_000;

fn instantiate(t: &Term, env: &BTreeMap<Var, GTerm>) -> GTerm {
    match t {
        Term::Var(v) => env[v].clone(),
        Term::Const(c) => GTerm::C(*c),
        Term::App(f, args) => GTerm::F(*f, args.iter().map(|a| instantiate(a, env)).collect()),
    }
}

/// Herbrand terms up to the universe's depth over the clause functions.
fn herbrand_terms(clauses: &[Clause], u: &GroundUniverse) -> Vec<GTerm> {
    let mut funs = BTreeSet::new();
    for c in clauses {
        for l in &c.literals {
            l.atom.args.iter().for_each(|t| collect_functions(t, &mut funs));
        }
    }
    let mut terms: Vec<GTerm> = u.constants.iter().map(|&c| GTerm::C(c)).collect();
    for _ in 0..u.max_term_depth {
        let mut next = terms.clone();
        for &(f, n) in &funs {
            for args in tuples(&terms, n) {
                let t = GTerm::F(f, args);
                if !next.contains(&t) {
                    next.push(t);
                }
            }
        }
        terms = next;
    }
    terms
}

fn tuples<T: Clone>(items: &[T], n: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for it in items {
                let mut p = prefix.clone();
                p.push(it.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Atom numbering for the propositional encodings.
#[derive(Default)]
struct AtomTable {
    ids: HashMap<(Sym, Vec<GTerm>), u32>,
}

impl AtomTable {
    fn id(&mut self, p: Sym, args: Vec<GTerm>) -> u32 {
        let n = self.ids.len() as u32;
        *self.ids.entry((p, args)).or_insert(n + 1)
    }

    fn len(&self) -> usize {
        self.ids.len()
    }
}

/// Satisfiability of the ground instances of `clauses` over `u`. Instances
/// whose terms exceed the depth bound are dropped, so the answer is exact
/// only for function-free input.
pub fn ground_sat(clauses: &[Clause], u: &GroundUniverse) -> Result<bool, OracleError> {
    ground_sat_capped(clauses, u, GROUND_CAP)
}

pub fn ground_sat_capped(clauses: &[Clause], u: &GroundUniverse, cap: usize) -> Result<bool, OracleError> {
    let terms = herbrand_terms(clauses, u);
    let mut table = AtomTable::default();
    let mut cnf: Vec<Vec<i32>> = Vec::new();
    let mut size = 0usize;
    for c in clauses {
        let vars: Vec<Var> = c.vars().into_iter().collect();
        let count = terms.len().checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
        size = size.saturating_add(count.saturating_mul(c.len().max(1)));
        if size > cap {
            return Err(OracleError::TooLarge(cap));
        }
        for assignment in tuples(&terms, vars.len()) {
            let env: BTreeMap<Var, GTerm> = vars.iter().copied().zip(assignment).collect();
            let mut lits = Vec::with_capacity(c.len());
            let mut too_deep = false;
            for l in &c.literals {
                let args: Vec<GTerm> = l.atom.args.iter().map(|t| instantiate(t, &env)).collect();
                if args.iter().any(|t| gdepth(t) > u.max_term_depth) {
                    too_deep = true;
                    break;
                }
                let id = table.id(l.atom.pred, args) as i32;
                lits.push(if l.positive { id } else { -id });
            }
            if !too_deep {
                cnf.push(lits);
            }
        }
    }
    Ok(dpll(table.len(), cnf))
}

/// `theory ∪ data ⊨ ∃ query` over the function-free universe of the inputs.
/// `query_clause` is the negated query.
pub fn entails(sig: &mut Signature, theory: &[Clause], data: &[Atom], query_clause: &Clause) -> Result<bool, OracleError> {
    let mut all: Vec<Clause> = theory.to_vec();
    all.extend(data.iter().map(|a| Clause::new(vec![crate::term::Literal::pos(a.clone())])));
    all.push(query_clause.clone());
    let u = GroundUniverse::for_clauses(sig, &all, 1, 0);
    Ok(!ground_sat(&all, &u)?)
}

/// DPLL with unit propagation and pure-literal-free chronological branching.
/// Atoms are numbered from 1.
pub fn dpll(atoms: usize, clauses: Vec<Vec<i32>>) -> bool {
    let mut assign: Vec<i8> = vec![0; atoms + 1];
    solve(&clauses, &mut assign)
}

fn value(assign: &[i8], l: i32) -> i8 {
    let v = assign[l.unsigned_abs() as usize];
    if l > 0 {
        v
    } else {
        -v
    }
}

fn solve(clauses: &[Vec<i32>], assign: &mut Vec<i8>) -> bool {
    let mut trail = Vec::new();
    // Unit propagation to fixpoint.
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut sat = false;
            for &l in c {
                match value(assign, l) {
                    1 => {
                        sat = true;
                        break;
                    }
                    0 => {
                        open += 1;
                        unassigned = Some(l);
                    }
                    _ => {}
                }
            }
            if sat {
                continue;
            }
            if open == 0 {
                for v in trail {
                    assign[v] = 0;
                }
                return false;
            }
            if open == 1 {
                let l = unassigned.expect("one open literal");
                let v = l.unsigned_abs() as usize;
                assign[v] = if l > 0 { 1 } else { -1 };
                trail.push(v);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let branch = clauses.iter().find_map(|c| {
        if c.iter().any(|&l| value(assign, l) == 1) {
            None
        } else {
            c.iter().copied().find(|&l| value(assign, l) == 0)
        }
    });
    let ok = match branch {
        None => true,
        Some(l) => {
            let v = l.unsigned_abs() as usize;
            let first: i8 = if l > 0 { 1 } else { -1 };
            let mut found = false;
            for val in [first, -first] {
                assign[v] = val;
                if solve(clauses, assign) {
                    found = true;
                    break;
                }
            }
            if !found {
                assign[v] = 0;
            }
            found
        }
    };
    if !ok {
        for v in trail {
            assign[v] = 0;
        }
    }
    ok
}

// Finite model search.

/// Interpretation of constants and functions over `0..n`.
struct Interp {
    n: usize,
    consts: HashMap<Sym, usize>,
    funs: HashMap<Sym, Vec<usize>>,
}

impl Interp {
    fn eval(&self, t: &Term, env: &BTreeMap<Var, usize>) -> usize {
        match t {
            Term::Var(v) => env[v],
            Term::Const(c) => self.consts[c],
            Term::App(f, args) => {
                let mut idx = 0;
                for a in args {
                    idx = idx * self.n + self.eval(a, env);
                }
                self.funs[f][idx]
            }
        }
    }
}

/// Enumerates every interpretation of `consts` and `funs` over `0..n`.
fn for_each_interp(n: usize, consts: &[Sym], funs: &[(Sym, usize)], mut visit: impl FnMut(&Interp) -> bool) -> bool {
    let mut slots: Vec<(Option<Sym>, Option<(Sym, usize)>)> = Vec::new();
    for &c in consts {
        slots.push((Some(c), None));
    }
    for &(f, k) in funs {
        for i in 0..n.pow(k as u32) {
            slots.push((None, Some((f, i))));
        }
    }
    let total = slots.len();
    let mut digits = vec![0usize; total];
    loop {
        let mut interp = Interp {
            n,
            consts: HashMap::new(),
            funs: funs.iter().map(|&(f, k)| (f, vec![0; n.pow(k as u32)])).collect(),
        };
        for (slot, &d) in slots.iter().zip(&digits) {
            match slot {
                (Some(c), _) => {
                    interp.consts.insert(*c, d);
                }
                (_, Some((f, i))) => interp.funs.get_mut(f).expect("function slot")[*i] = d,
                _ => unreachable!(),
            }
        }
        if visit(&interp) {
            return true;
        }
        // Next assignment in base n.
        let mut i = 0;
        loop {
            if i == total {
                return false;
            }
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn signature_of_clauses(clauses: &[Clause]) -> (Vec<Sym>, Vec<(Sym, usize)>) {
    let mut consts = BTreeSet::new();
    let mut funs = BTreeSet::new();
    for c in clauses {
        for l in &c.literals {
            for t in &l.atom.args {
                collect_constants(t, &mut consts);
                collect_functions(t, &mut funs);
            }
        }
    }
    (consts.into_iter().collect(), funs.into_iter().collect())
}

/// Whether `clauses` have a model with exactly `n` elements.
pub fn clauses_have_model(clauses: &[Clause], n: usize) -> bool {
    let (consts, funs) = signature_of_clauses(clauses);
    for_each_interp(n, &consts, &funs, |interp| {
        let mut table: HashMap<(Sym, Vec<usize>), u32> = HashMap::new();
        let mut cnf = Vec::new();
        for c in clauses {
            let vars: Vec<Var> = c.vars().into_iter().collect();
            let dom: Vec<usize> = (0..n).collect();
            for asg in tuples(&dom, vars.len()) {
                let env: BTreeMap<Var, usize> = vars.iter().copied().zip(asg).collect();
                let lits = c
                    .literals
                    .iter()
                    .map(|l| {
                        let args: Vec<usize> = l.atom.args.iter().map(|t| interp.eval(t, &env)).collect();
                        let k = table.len() as u32 + 1;
                        let id = *table.entry((l.atom.pred, args)).or_insert(k) as i32;
                        if l.positive {
                            id
                        } else {
                            -id
                        }
                    })
                    .collect();
                cnf.push(lits);
            }
        }
        dpll(table.len(), cnf)
    })
}

/// Propositional skeleton of a formula grounded over a finite domain.
enum Prop {
    Atom(u32),
    Const(bool),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

fn ground_formula(
    f: &Formula,
    interp: &Interp,
    env: &mut BTreeMap<Var, usize>,
    table: &mut HashMap<(Sym, Vec<usize>), u32>,
) -> Prop {
    let n = interp.n;
    match f {
        Formula::Atom(a) => {
            let args: Vec<usize> = a.args.iter().map(|t| interp.eval(t, env)).collect();
            let k = table.len() as u32 + 1;
            Prop::Atom(*table.entry((a.pred, args)).or_insert(k))
        }
        Formula::True => Prop::Const(true),
        Formula::False => Prop::Const(false),
        Formula::Not(g) => Prop::Not(Box::new(ground_formula(g, interp, env, table))),
        Formula::And(gs) => Prop::And(gs.iter().map(|g| ground_formula(g, interp, env, table)).collect()),
        Formula::Or(gs) => Prop::Or(gs.iter().map(|g| ground_formula(g, interp, env, table)).collect()),
        Formula::Implies(a, b) => Prop::Or(vec![
            Prop::Not(Box::new(ground_formula(a, interp, env, table))),
            ground_formula(b, interp, env, table),
        ]),
        Formula::Iff(a, b) => {
            let (pa, pb) = (ground_formula(a, interp, env, table), ground_formula(b, interp, env, table));
            let (na, nb) = (ground_formula(a, interp, env, table), ground_formula(b, interp, env, table));
            Prop::Or(vec![
                Prop::And(vec![pa, pb]),
                Prop::And(vec![Prop::Not(Box::new(na)), Prop::Not(Box::new(nb))]),
            ])
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let saved: Vec<(Var, Option<usize>)> = vs.iter().map(|v| (*v, env.get(v).copied())).collect();
            let dom: Vec<usize> = (0..n).collect();
            let mut parts = Vec::new();
            for asg in tuples(&dom, vs.len()) {
                for (v, d) in vs.iter().zip(asg) {
                    env.insert(*v, d);
                }
                parts.push(ground_formula(g, interp, env, table));
            }
            for (v, old) in saved {
                match old {
                    Some(d) => env.insert(v, d),
                    None => env.remove(&v),
                };
            }
            if matches!(f, Formula::Forall(..)) {
                Prop::And(parts)
            } else {
                Prop::Or(parts)
            }
        }
    }
}

/// Tseitin encoding; returns the literal standing for `p`.
fn tseitin(p: &Prop, next: &mut i32, cnf: &mut Vec<Vec<i32>>) -> i32 {
    match p {
        Prop::Atom(a) => *a as i32,
        Prop::Const(b) => {
            *next += 1;
            let v = *next;
            cnf.push(vec![if *b { v } else { -v }]);
            v
        }
        Prop::Not(q) => -tseitin(q, next, cnf),
        Prop::And(qs) | Prop::Or(qs) => {
            let lits: Vec<i32> = qs.iter().map(|q| tseitin(q, next, cnf)).collect();
            *next += 1;
            let v = *next;
            if matches!(p, Prop::And(_)) {
                // v <-> /\ lits
                for &l in &lits {
                    cnf.push(vec![-v, l]);
                }
                let mut c: Vec<i32> = lits.iter().map(|l| -l).collect();
                c.push(v);
                cnf.push(c);
            } else {
                let mut c = lits.clone();
                c.push(-v);
                cnf.push(c);
                for &l in &lits {
                    cnf.push(vec![v, -l]);
                }
            }
            v
        }
    }
}

fn formula_symbols(f: &Formula, consts: &mut BTreeSet<Sym>, funs: &mut BTreeSet<(Sym, usize)>) {
    let mut atoms = Vec::new();
    f.atoms(&mut atoms);
    for a in atoms {
        for t in &a.args {
            collect_constants(t, consts);
            collect_functions(t, funs);
        }
    }
}

/// Whether the conjunction of the (closed) sentences `fs` has a model with
/// exactly `n` elements. Free variables are read existentially.
pub fn formulas_have_model(fs: &[Formula], n: usize) -> bool {
    let mut consts = BTreeSet::new();
    let mut funs = BTreeSet::new();
    for f in fs {
        formula_symbols(f, &mut consts, &mut funs);
    }
    let closed: Vec<Formula> = fs
        .iter()
        .map(|f| Formula::exists(f.free_vars().into_iter().collect(), f.clone()))
        .collect();
    let consts: Vec<Sym> = consts.into_iter().collect();
    let funs: Vec<(Sym, usize)> = funs.into_iter().collect();
    for_each_interp(n, &consts, &funs, |interp| {
        let mut table = HashMap::new();
        let props: Vec<Prop> = closed
            .iter()
            .map(|f| ground_formula(f, interp, &mut BTreeMap::new(), &mut table))
            .collect();
        let mut next = table.len() as i32;
        let mut cnf = Vec::new();
        for p in &props {
            let l = tseitin(p, &mut next, &mut cnf);
            cnf.push(vec![l]);
        }
        dpll(next as usize, cnf)
    })
}

/// GYO reduction on the hypergraph of a query clause: repeatedly drop
/// vertices that occur in a single edge and edges contained in another.
/// Acyclic iff nothing is left. Constants are ignored.
pub fn gyo_acyclic(q: &Clause) -> bool {
    let mut edges: Vec<BTreeSet<u32>> = q
        .literals
        .iter()
        .map(|l| {
            let mut vs = BTreeSet::new();
            for t in &l.atom.args {
                gather(t, &mut vs);
            }
            vs
        })
        .collect();
    loop {
        let mut changed = false;
        // Ears: vertices in exactly one edge.
        let mut count: BTreeMap<u32, usize> = BTreeMap::new();
        for e in &edges {
            for &v in e {
                *count.entry(v).or_default() += 1;
            }
        }
        for e in edges.iter_mut() {
            let before = e.len();
            e.retain(|v| count[v] > 1);
            changed |= e.len() != before;
        }
        // Edges contained in another edge (or empty).
        let mut i = 0;
        while i < edges.len() {
            let contained = edges[i].is_empty()
                || edges
                    .iter()
                    .enumerate()
                    .any(|(j, f)| j != i && edges[i].is_subset(f));
            if contained {
                edges.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
        if edges.is_empty() {
            return true;
        }
        if !changed {
            return false;
        }
    }
}

fn gather(t: &Term, out: &mut BTreeSet<u32>) {
    match t {
        Term::Var(v) => {
            out.insert(v.0);
        }
        Term::Const(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| gather(a, out)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Literal;

    fn lit(p: Sym, positive: bool, args: Vec<Term>) -> Literal {
        Literal {
            positive,
            atom: Atom::new(p, args),
        }
    }

    #[test]
    fn complementary_units() {
        let mut sig = Signature::new();
        let p = sig.predicate("p", 1);
        let a = sig.constant("a");
        let cs = vec![
            Clause::new(vec![lit(p, true, vec![Term::Const(a)])]),
            Clause::new(vec![lit(p, false, vec![Term::Const(a)])]),
        ];
        let u = GroundUniverse::for_clauses(&mut sig, &cs, 1, 0);
        assert!(!ground_sat(&cs, &u).unwrap());
    }

    #[test]
    fn unit_propagation_chain() {
        let mut sig = Signature::new();
        let p = sig.predicate("p", 1);
        let q = sig.predicate("q", 1);
        let a = sig.constant("a");
        let x = Term::var(0);
        let cs = vec![
            Clause::new(vec![lit(p, false, vec![x.clone()]), lit(q, true, vec![x])]),
            Clause::new(vec![lit(p, true, vec![Term::Const(a)])]),
            Clause::new(vec![lit(q, false, vec![Term::Const(a)])]),
        ];
        let u = GroundUniverse::for_clauses(&mut sig, &cs, 1, 0);
        assert!(!ground_sat(&cs, &u).unwrap());
    }

    #[test]
    fn all_negative_set_is_satisfiable() {
        let mut sig = Signature::new();
        let a = sig.predicate("a", 2);
        let b = sig.predicate("b", 2);
        let c = Clause::new(vec![
            lit(a, false, vec![Term::var(0), Term::var(1)]),
            lit(b, false, vec![Term::var(1), Term::var(2)]),
        ]);
        let u = GroundUniverse::for_clauses(&mut sig, std::slice::from_ref(&c), 2, 0);
        assert!(ground_sat(&[c], &u).unwrap());
    }

    #[test]
    fn ears() {
        let mut sig = Signature::new();
        let r = sig.predicate("r", 2);
        let e = |x, y| lit(r, false, vec![Term::var(x), Term::var(y)]);
        assert!(gyo_acyclic(&Clause::new(vec![e(0, 1)])));
        assert!(gyo_acyclic(&Clause::new(vec![e(0, 1), e(1, 2)])));
        assert!(!gyo_acyclic(&Clause::new(vec![e(0, 1), e(1, 2), e(2, 0)])));
    }

    #[test]
    fn function_models() {
        let mut sig = Signature::new();
        let p = sig.predicate("p", 1);
        let f = sig.function("f", 1);
        let x = Term::var(0);
        // p(x) | p(f(x)) and ~p(x) | ~p(f(x)): needs f to swap two elements.
        let cs = vec![
            Clause::new(vec![lit(p, true, vec![x.clone()]), lit(p, true, vec![Term::App(f, vec![x.clone()])])]),
            Clause::new(vec![lit(p, false, vec![x.clone()]), lit(p, false, vec![Term::App(f, vec![x])])]),
        ];
        assert!(!clauses_have_model(&cs, 1));
        assert!(clauses_have_model(&cs, 2));
    }
}
