//! First-order formulas, negation normal form, the guardedness check and
//! conversion of Boolean conjunctive queries into query clauses.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::term::{Atom, Clause, Literal, Signature, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom(Atom),
    True,
    False,
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<Var>, Box<Formula>),
    Exists(Vec<Var>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(vs: Vec<Var>, f: Formula) -> Formula {
        if vs.is_empty() {
            f
        } else {
            Formula::Forall(vs, Box::new(f))
        }
    }

    pub fn exists(vs: Vec<Var>, f: Formula) -> Formula {
        if vs.is_empty() {
            f
        } else {
            Formula::Exists(vs, Box::new(f))
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom(a) => {
                for v in a.vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::True | Formula::False => {}
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => {
                let n = bound.len();
                bound.extend(vs.iter().copied());
                f.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Number of universally quantified subformulas after moving negations
    /// inwards (an existential under an odd number of negations counts).
    pub fn universal_count(&self) -> usize {
        fn go(f: &Formula, pos: bool) -> usize {
            match f {
                Formula::Atom(_) | Formula::True | Formula::False => 0,
                Formula::Not(g) => go(g, !pos),
                Formula::And(fs) | Formula::Or(fs) => fs.iter().map(|g| go(g, pos)).sum(),
                Formula::Implies(a, b) => go(a, !pos) + go(b, pos),
                Formula::Iff(a, b) => go(a, pos) + go(a, !pos) + go(b, pos) + go(b, !pos),
                Formula::Forall(_, g) => usize::from(pos) + go(g, pos),
                Formula::Exists(_, g) => usize::from(!pos) + go(g, pos),
            }
        }
        go(self, true)
    }

    pub fn atoms(&self, out: &mut Vec<Atom>) {
        match self {
            Formula::Atom(a) => out.push(a.clone()),
            Formula::True | Formula::False => {}
            Formula::Not(f) => f.atoms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.atoms(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
            Formula::Forall(_, f) | Formula::Exists(_, f) => f.atoms(out),
        }
    }
}

/// Formula in negation normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nnf {
    Lit(Literal),
    True,
    False,
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    Forall(Vec<Var>, Box<Nnf>),
    Exists(Vec<Var>, Box<Nnf>),
}

impl Nnf {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn go(f: &Nnf, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            match f {
                Nnf::Lit(l) => out.extend(l.vars().into_iter().filter(|v| !bound.contains(v))),
                Nnf::True | Nnf::False => {}
                Nnf::And(fs) | Nnf::Or(fs) => fs.iter().for_each(|g| go(g, bound, out)),
                Nnf::Forall(vs, g) | Nnf::Exists(vs, g) => {
                    let n = bound.len();
                    bound.extend(vs.iter().copied());
                    go(g, bound, out);
                    bound.truncate(n);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Nnf::Lit(l) if l.positive => Formula::Atom(l.atom.clone()),
            Nnf::Lit(l) => Formula::not(Formula::Atom(l.atom.clone())),
            Nnf::True => Formula::True,
            Nnf::False => Formula::False,
            Nnf::And(fs) => Formula::And(fs.iter().map(Nnf::to_formula).collect()),
            Nnf::Or(fs) => Formula::Or(fs.iter().map(Nnf::to_formula).collect()),
            Nnf::Forall(vs, f) => Formula::Forall(vs.clone(), Box::new(f.to_formula())),
            Nnf::Exists(vs, f) => Formula::Exists(vs.clone(), Box::new(f.to_formula())),
        }
    }
}

/// Negation normal form; `<->` is expanded into two implications first.
pub fn nnf(f: &Formula) -> Nnf {
    to_nnf(f, true)
}

fn to_nnf(f: &Formula, pos: bool) -> Nnf {
    match f {
        Formula::Atom(a) => Nnf::Lit(Literal {
            positive: pos,
            atom: a.clone(),
        }),
        Formula::True => {
            if pos {
                Nnf::True
            } else {
                Nnf::False
            }
        }
        Formula::False => {
            if pos {
                Nnf::False
            } else {
                Nnf::True
            }
        }
        Formula::Not(g) => to_nnf(g, !pos),
        Formula::And(fs) => {
            let parts = fs.iter().map(|g| to_nnf(g, pos)).collect();
            if pos {
                Nnf::And(parts)
            } else {
                Nnf::Or(parts)
            }
        }
        Formula::Or(fs) => {
            let parts = fs.iter().map(|g| to_nnf(g, pos)).collect();
            if pos {
                Nnf::Or(parts)
            } else {
                Nnf::And(parts)
            }
        }
        Formula::Implies(a, b) => {
            let parts = vec![to_nnf(a, !pos), to_nnf(b, pos)];
            if pos {
                Nnf::Or(parts)
            } else {
                // ~(a -> b) = a & ~b
                Nnf::And(vec![to_nnf(a, true), to_nnf(b, false)])
            }
        }
        Formula::Iff(a, b) => {
            let expanded = Formula::And(vec![
                Formula::implies((**a).clone(), (**b).clone()),
                Formula::implies((**b).clone(), (**a).clone()),
            ]);
            to_nnf(&expanded, pos)
        }
        Formula::Forall(vs, g) => {
            let body = Box::new(to_nnf(g, pos));
            if pos {
                Nnf::Forall(vs.clone(), body)
            } else {
                Nnf::Exists(vs.clone(), body)
            }
        }
        Formula::Exists(vs, g) => {
            let body = Box::new(to_nnf(g, pos));
            if pos {
                Nnf::Exists(vs.clone(), body)
            } else {
                Nnf::Forall(vs.clone(), body)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    NotGuarded,
    LooselyGuarded,
    Guarded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardednessReport {
    pub verdict: Verdict,
    /// First offending subformula when not guarded.
    pub witness: Option<Formula>,
}

/// Guard conditions for one quantified subformula. `delta` are the guard
/// candidates and `rest` the remaining body.
fn quantifier_verdict(vars: &[Var], delta: &[&Atom], rest_free: &BTreeSet<Var>) -> Verdict {
    if delta.is_empty() {
        return Verdict::NotGuarded;
    }
    let sets: Vec<BTreeSet<Var>> = delta.iter().map(|a| a.vars()).collect();
    for (i, g) in sets.iter().enumerate() {
        let mut need: BTreeSet<Var> = rest_free.clone();
        need.extend(vars.iter().copied());
        for (j, s) in sets.iter().enumerate() {
            if j != i {
                need.extend(s.iter().copied());
            }
        }
        if need.is_subset(g) {
            return Verdict::Guarded;
        }
    }
    let all: BTreeSet<Var> = sets.iter().flatten().copied().collect();
    if !rest_free.is_subset(&all) || !vars.iter().all(|v| all.contains(v)) {
        return Verdict::NotGuarded;
    }
    for x in vars {
        for y in &all {
            if x != y && !sets.iter().any(|s| s.contains(x) && s.contains(y)) {
                return Verdict::NotGuarded;
            }
        }
    }
    Verdict::LooselyGuarded
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(fs) => fs.iter().flat_map(conjuncts).collect(),
        _ => vec![f],
    }
}

fn free_of_all(fs: &[&Formula]) -> BTreeSet<Var> {
    fs.iter().flat_map(|f| f.free_vars()).collect()
}

/// Splits a quantifier body into guard candidates and the guarded rest.
fn atom_of(f: &Formula) -> Option<&Atom> {
    match f {
        Formula::Atom(a) => Some(a),
        _ => None,
    }
}

fn guard_split(universal: bool, body: &Formula) -> (Vec<&Atom>, Vec<&Formula>) {
    let is_atom = |f: &&Formula| matches!(f, Formula::Atom(_));
    if universal {
        match body {
            Formula::Implies(d, f) => {
                let cs = conjuncts(d);
                let delta: Vec<&Atom> = cs.iter().filter_map(|c| atom_of(c)).collect();
                let mut rest: Vec<&Formula> = cs.into_iter().filter(|c| !is_atom(c)).collect();
                rest.push(f);
                (delta, rest)
            }
            Formula::Not(g) => match &**g {
                Formula::Atom(a) => (vec![a], vec![]),
                Formula::And(_) => {
                    let cs = conjuncts(g);
                    let delta = cs.iter().filter_map(|c| atom_of(c)).collect();
                    let rest = cs.into_iter().filter(|c| !is_atom(c)).collect();
                    (delta, rest)
                }
                _ => (vec![], vec![body]),
            },
            Formula::Or(ds) => {
                let mut delta = Vec::new();
                let mut rest = Vec::new();
                for d in ds {
                    match d {
                        Formula::Not(g) if matches!(**g, Formula::Atom(_)) => delta.push(atom_of(g).unwrap()),
                        _ => rest.push(d),
                    }
                }
                (delta, rest)
            }
            _ => (vec![], vec![body]),
        }
    } else {
        let cs = conjuncts(body);
        let delta = cs.iter().filter_map(|c| atom_of(c)).collect();
        let rest = cs.into_iter().filter(|c| !is_atom(c)).collect();
        (delta, rest)
    }
}

fn has_compound(a: &Atom) -> bool {
    a.args.iter().any(Term::is_compound)
}

fn check(f: &Formula) -> (Verdict, Option<Formula>) {
    let combine = |parts: Vec<(Verdict, Option<Formula>)>| {
        let v = parts.iter().map(|p| p.0).min().unwrap_or(Verdict::Guarded);
        let w = parts
            .into_iter()
            .find(|p| p.0 == Verdict::NotGuarded)
            .and_then(|p| p.1);
        (v, w)
    };
    match f {
        Formula::Atom(a) => {
            if has_compound(a) {
                (Verdict::NotGuarded, Some(f.clone()))
            } else {
                (Verdict::Guarded, None)
            }
        }
        Formula::True | Formula::False => (Verdict::Guarded, None),
        Formula::Not(g) => check(g),
        Formula::And(fs) | Formula::Or(fs) => combine(fs.iter().map(check).collect()),
        Formula::Implies(a, b) | Formula::Iff(a, b) => combine(vec![check(a), check(b)]),
        Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
            let universal = matches!(f, Formula::Forall(..));
            let (delta, rest) = guard_split(universal, body);
            if delta.iter().any(|a| has_compound(a)) {
                return (Verdict::NotGuarded, Some(f.clone()));
            }
            let here = quantifier_verdict(vs, &delta, &free_of_all(&rest));
            let inner = combine(rest.iter().map(|g| check(g)).collect());
            if here == Verdict::NotGuarded {
                return (Verdict::NotGuarded, Some(f.clone()));
            }
            combine(vec![(here, None), inner])
        }
    }
}

/// Classifies a formula as guarded, loosely guarded or neither.
pub fn check_guardedness(f: &Formula) -> GuardednessReport {
    let (verdict, witness) = check(f);
    GuardednessReport {
        verdict,
        witness: if verdict == Verdict::NotGuarded { witness } else { None },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BcqError {
    #[error("query argument is a compound term")]
    CompoundTerm,
    #[error("query conjunct is not an atom")]
    NonAtomicConjunct,
}

/// The query clause `~A1 | ... | ~An` of `exists x̄ (A1 & ... & An)`.
/// Free variables are read as existentially quantified.
pub fn negate_bcq(q: &Formula) -> Result<Clause, BcqError> {
    let mut body = q;
    while let Formula::Exists(_, b) = body {
        body = b;
    }
    let mut lits = Vec::new();
    for c in conjuncts(body) {
        match c {
            Formula::Atom(a) => {
                if has_compound(a) {
                    return Err(BcqError::CompoundTerm);
                }
                lits.push(Literal::neg(a.clone()));
            }
            _ => return Err(BcqError::NonAtomicConjunct),
        }
    }
    Ok(Clause::new(lits))
}

/// Operator strength, higher binds tighter.
fn strength(f: &Formula) -> u8 {
    match f {
        Formula::Forall(..) | Formula::Exists(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(_) => 3,
        Formula::And(_) => 4,
        Formula::Not(_) => 5,
        Formula::Atom(_) | Formula::True | Formula::False => 6,
    }
}

/// Pretty-printer matching the input grammar.
pub struct FormulaPrinter<'a> {
    pub sig: &'a Signature,
    pub var_name: &'a dyn Fn(Var) -> String,
}

impl FormulaPrinter<'_> {
    pub fn show(&self, f: &Formula) -> String {
        let mut s = String::new();
        self.write(f, 0, true, &mut s);
        s
    }

    pub fn show_term(&self, t: &Term) -> String {
        let mut s = String::new();
        self.write_term(t, &mut s);
        s
    }

    pub fn show_atom(&self, a: &Atom) -> String {
        let mut s = String::new();
        self.write_atom(a, &mut s);
        s
    }

    fn write_term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(&(self.var_name)(*v)),
            Term::Const(c) => out.push_str(self.sig.name(*c)),
            Term::App(f, args) => {
                out.push_str(self.sig.name(*f));
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.write_term(a, out);
                }
                out.push(')');
            }
        }
    }

    fn write_atom(&self, a: &Atom, out: &mut String) {
        out.push_str(self.sig.name(a.pred));
        if !a.args.is_empty() {
            out.push('(');
            for (i, t) in a.args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                self.write_term(t, out);
            }
            out.push(')');
        }
    }

    /// `min` is the weakest operator allowed bare here; `open_right` says
    /// nothing follows inside the current parenthesised region.
    fn write(&self, f: &Formula, min: u8, open_right: bool, out: &mut String) {
        let s = strength(f);
        let bare = if s == 0 { open_right } else { s >= min };
        if !bare {
            out.push('(');
            self.write(f, 0, true, out);
            out.push(')');
            return;
        }
        match f {
            Formula::Atom(a) => self.write_atom(a, out),
            Formula::True => out.push_str("$true"),
            Formula::False => out.push_str("$false"),
            Formula::Not(g) => {
                out.push('~');
                if strength(g) >= 5 {
                    self.write(g, 5, false, out);
                } else {
                    out.push('(');
                    self.write(g, 0, true, out);
                    out.push(')');
                }
            }
            Formula::And(fs) | Formula::Or(fs) => {
                let op = if matches!(f, Formula::And(_)) { " & " } else { " | " };
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(op);
                    }
                    let last = i + 1 == fs.len();
                    // Same operator nested inside is parenthesised.
                    self.write(g, s + 1, open_right && last, out);
                }
            }
            Formula::Implies(a, b) => {
                self.write(a, 3, false, out);
                out.push_str(" -> ");
                self.write(b, 2, open_right, out);
            }
            Formula::Iff(a, b) => {
                self.write(a, 2, false, out);
                out.push_str(" <-> ");
                self.write(b, 2, open_right, out);
            }
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                out.push_str(if matches!(f, Formula::Forall(..)) { "forall " } else { "exists " });
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&(self.var_name)(*v));
                }
                out.push_str(" . ");
                if strength(g) >= 5 || strength(g) == 0 {
                    self.write(g, 0, true, out);
                } else {
                    out.push('(');
                    self.write(g, 0, true, out);
                    out.push(')');
                }
            }
        }
    }
}

/// Default variable naming `X0`, `X1`, ...
pub fn default_var_name(v: Var) -> String {
    let mut s = String::new();
    let _ = write!(s, "X{}", v.0);
    s
}
