//! Seeded random problem generators for the property and agreement suites.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::clausify::clausify;
use crate::formula::{negate_bcq, Formula};
use crate::term::{Atom, Clause, Literal, Signature, Sym, Term, Var};

pub use rand::SeedableRng;

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small vocabulary: predicates with their arities and constants.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    pub preds: Vec<(Sym, usize)>,
    pub constants: Vec<Sym>,
    pub functions: Vec<(Sym, usize)>,
}

impl Vocabulary {
    /// `npreds` predicates with arities in `1..=max_arity` (one of them of
    /// maximal arity) and `nconst` constants.
    pub fn random(rng: &mut GenRng, sig: &mut Signature, npreds: usize, max_arity: usize, nconst: usize) -> Self {
        let mut preds = Vec::new();
        for i in 0..npreds {
            let arity = if i == 0 { max_arity } else { rng.gen_range(1..=max_arity) };
            preds.push((sig.predicate(&format!("p{i}"), arity), arity));
        }
        let constants = (0..nconst).map(|i| sig.constant(&format!("c{i}"))).collect();
        Vocabulary {
            preds,
            constants,
            functions: Vec::new(),
        }
    }

    fn with_arity_at_least(&self, n: usize) -> Vec<(Sym, usize)> {
        self.preds.iter().copied().filter(|&(_, a)| a >= n).collect()
    }
}

/// An atom over `pred` whose arguments are drawn from `vars` (each of
/// `must` at least once) and the constants.
fn atom_covering(rng: &mut GenRng, voc: &Vocabulary, pred: (Sym, usize), must: &[Var], vars: &[Var]) -> Atom {
    let (p, arity) = pred;
    let mut args: Vec<Term> = must.iter().map(|&v| Term::Var(v)).collect();
    while args.len() < arity {
        if !vars.is_empty() && (voc.constants.is_empty() || rng.gen_bool(0.8)) {
            args.push(Term::Var(*vars.choose(rng).expect("non-empty")));
        } else if !voc.constants.is_empty() {
            args.push(Term::Const(*voc.constants.choose(rng).expect("non-empty")));
        } else {
            args.push(Term::Var(must[0]));
        }
    }
    args.shuffle(rng);
    Atom::new(p, args)
}

fn random_atom(rng: &mut GenRng, voc: &Vocabulary, vars: &[Var]) -> Atom {
    let pred = *voc.preds.choose(rng).expect("predicates");
    atom_covering(rng, voc, pred, &[], vars)
}

fn literal_formula(rng: &mut GenRng, a: Atom) -> Formula {
    if rng.gen_bool(0.5) {
        Formula::Atom(a)
    } else {
        Formula::not(Formula::Atom(a))
    }
}

/// Settings for the guarded formula generator.
#[derive(Clone, Copy, Debug)]
pub struct FormulaShape {
    pub depth: usize,
    /// Allow existential quantifiers below universal ones (Skolem functions).
    pub nested_exists: bool,
    pub max_new_vars: usize,
}

/// A guarded formula whose free variables are among `bound`.
pub fn guarded_formula(
    rng: &mut GenRng,
    voc: &Vocabulary,
    bound: &[Var],
    next_var: &mut u32,
    shape: FormulaShape,
    under_forall: bool,
) -> Formula {
    let leaf = shape.depth == 0 || rng.gen_bool(0.3);
    if leaf {
        let a = random_atom(rng, voc, bound);
        return literal_formula(rng, a);
    }
    let inner = FormulaShape {
        depth: shape.depth - 1,
        ..shape
    };
    match rng.gen_range(0..4) {
        0 | 1 => {
            let exists = rng.gen_bool(0.4) && (shape.nested_exists || !under_forall);
            quantified(rng, voc, bound, next_var, inner, exists, under_forall)
        }
        2 => Formula::And(vec![
            guarded_formula(rng, voc, bound, next_var, inner, under_forall),
            guarded_formula(rng, voc, bound, next_var, inner, under_forall),
        ]),
        _ => Formula::Or(vec![
            guarded_formula(rng, voc, bound, next_var, inner, under_forall),
            guarded_formula(rng, voc, bound, next_var, inner, under_forall),
        ]),
    }
}

/// `forall ȳ (G -> F)` or `exists ȳ (G & F)` with an atomic guard `G`
/// covering its free variables and ȳ.
fn quantified(
    rng: &mut GenRng,
    voc: &Vocabulary,
    bound: &[Var],
    next_var: &mut u32,
    shape: FormulaShape,
    exists: bool,
    under_forall: bool,
) -> Formula {
    let max_arity = voc.preds.iter().map(|p| p.1).max().unwrap_or(1);
    let keep: Vec<Var> = bound
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(0.6))
        .take(max_arity.saturating_sub(1))
        .collect();
    let room = max_arity - keep.len();
    let n_new = rng.gen_range(1..=room.clamp(1, shape.max_new_vars));
    let new: Vec<Var> = (0..n_new)
        .map(|_| {
            *next_var += 1;
            Var(*next_var)
        })
        .collect();
    let mut guard_vars = keep.clone();
    guard_vars.extend(new.iter().copied());
    let pred = *voc
        .with_arity_at_least(guard_vars.len())
        .choose(rng)
        .expect("a predicate of maximal arity exists");
    let guard = Formula::Atom(atom_covering(rng, voc, pred, &guard_vars, &guard_vars));
    let body = guarded_formula(rng, voc, &guard_vars, next_var, shape, under_forall || !exists);
    if exists {
        Formula::exists(new, Formula::And(vec![guard, body]))
    } else {
        Formula::forall(new, Formula::implies(guard, body))
    }
}

/// A closed guarded sentence.
pub fn guarded_sentence(rng: &mut GenRng, voc: &Vocabulary, shape: FormulaShape) -> Formula {
    let mut next = 0;
    if rng.gen_bool(0.15) && !voc.constants.is_empty() {
        // Ground disjunction.
        let n = rng.gen_range(1..=2);
        let lits = (0..n)
            .map(|_| {
                let a = random_atom(rng, voc, &[]);
                literal_formula(rng, a)
            })
            .collect::<Vec<_>>();
        return if lits.len() == 1 { lits.into_iter().next().expect("one") } else { Formula::Or(lits) };
    }
    let exists = rng.gen_bool(0.3);
    quantified(rng, voc, &[], &mut next, shape, exists, false)
}

/// A random Boolean conjunctive query over at most `max_atoms` atoms.
pub fn bcq(rng: &mut GenRng, voc: &Vocabulary, max_atoms: usize, max_vars: u32) -> Formula {
    let n = rng.gen_range(1..=max_atoms);
    let vars: Vec<Var> = (0..max_vars).map(Var).collect();
    let atoms: Vec<Formula> = (0..n)
        .map(|_| {
            let (p, arity) = *voc.preds.choose(rng).expect("predicates");
            let args = (0..arity)
                .map(|_| {
                    if !voc.constants.is_empty() && rng.gen_bool(0.15) {
                        Term::Const(*voc.constants.choose(rng).expect("constants"))
                    } else {
                        Term::Var(*vars.choose(rng).expect("vars"))
                    }
                })
                .collect();
            Formula::Atom(Atom::new(p, args))
        })
        .collect();
    let body = if atoms.len() == 1 {
        atoms.into_iter().next().expect("one")
    } else {
        Formula::And(atoms)
    };
    let free: Vec<Var> = body.free_vars().into_iter().collect();
    Formula::exists(free, body)
}

/// A query answering instance over a function-free guarded theory.
#[derive(Clone, Debug)]
pub struct QueryInstance {
    pub sig: Signature,
    pub theory: Vec<Formula>,
    pub clauses: Vec<Clause>,
    pub data: Vec<Atom>,
    pub query: Formula,
    pub query_clause: Clause,
    /// Universal subformulas of the theory.
    pub universals: usize,
}

/// Function-free guarded theory (at most `max_clauses` clauses after
/// clausification, three predicates of arity at most two, at most three
/// constants counting Skolem constants), some data and a BCQ of at most
/// three atoms.
pub fn function_free_instance(rng: &mut GenRng, max_clauses: usize) -> QueryInstance {
    loop {
        let mut sig = Signature::new();
        let nconst = rng.gen_range(1..=2);
        let voc = Vocabulary::random(rng, &mut sig, 3, 2, nconst);
        let shape = FormulaShape {
            depth: 2,
            nested_exists: false,
            max_new_vars: 2,
        };
        let nformulas = rng.gen_range(1..=3);
        let theory: Vec<Formula> = (0..nformulas).map(|_| guarded_sentence(rng, &voc, shape)).collect();
        let mut clauses = Vec::new();
        let mut ok = true;
        for f in &theory {
            match clausify(&mut sig, f) {
                Ok(out) => clauses.extend(out.clauses),
                Err(_) => ok = false,
            }
        }
        let constants = sig
            .symbols()
            .filter(|(_, s)| s.kind == crate::term::SymbolKind::Constant)
            .count();
        let has_functions = sig.symbols().any(|(_, s)| s.kind == crate::term::SymbolKind::Function);
        if !ok || clauses.len() > max_clauses || constants > 3 || has_functions {
            continue;
        }
        let all_consts: Vec<Sym> = sig
            .symbols()
            .filter(|(_, s)| s.kind == crate::term::SymbolKind::Constant)
            .map(|(s, _)| s)
            .collect();
        let data_voc = Vocabulary {
            constants: all_consts,
            ..voc.clone()
        };
        let ndata = rng.gen_range(0..=3);
        let data = (0..ndata).map(|_| random_atom(rng, &data_voc, &[])).collect();
        let query = bcq(rng, &voc, 3, 4);
        let query_clause = negate_bcq(&query).expect("generated BCQ");
        let universals = theory.iter().map(Formula::universal_count).sum();
        return QueryInstance {
            sig,
            theory,
            clauses,
            data,
            query,
            query_clause,
            universals,
        };
    }
}

/// Clausified guarded sentences with Skolem functions plus a few ground
/// facts: the input of the closure suite.
pub fn guarded_clause_set(rng: &mut GenRng) -> (Signature, Vec<Formula>, Vec<Clause>) {
    loop {
        let mut sig = Signature::new();
        let nconst = rng.gen_range(1..=2);
        let voc = Vocabulary::random(rng, &mut sig, 3, 3, nconst);
        let shape = FormulaShape {
            depth: 3,
            nested_exists: true,
            max_new_vars: 2,
        };
        let mut clauses = Vec::new();
        let mut ok = true;
        let formulas: Vec<Formula> = (0..rng.gen_range(1..=4)).map(|_| guarded_sentence(rng, &voc, shape)).collect();
        for f in &formulas {
            match clausify(&mut sig, f) {
                Ok(out) => clauses.extend(out.clauses),
                Err(_) => ok = false,
            }
        }
        for _ in 0..rng.gen_range(1..=4) {
            let a = random_atom(rng, &voc, &[]);
            clauses.push(Clause::new(vec![Literal::pos(a)]));
        }
        if ok && clauses.len() <= 28 {
            return (sig, formulas, clauses);
        }
    }
}

/// Loosely guarded clauses: loose guards over two or three variables,
/// flat side literals and positive literals with covering Skolem terms,
/// plus ground facts.
pub fn loosely_guarded_clause_set(rng: &mut GenRng) -> (Signature, Vec<Clause>) {
    let mut sig = Signature::new();
    let voc = Vocabulary::random(rng, &mut sig, 3, 2, 2);
    let nvars = rng.gen_range(2..=3u32);
    let fun = sig.function("sf", nvars as usize);
    let binary = voc.with_arity_at_least(2);
    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let vars: Vec<Var> = (0..nvars).map(Var).collect();
        let mut lits = Vec::new();
        // One binary guard per variable pair.
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                let (p, _) = *binary.choose(rng).expect("binary predicate");
                lits.push(Literal::neg(Atom::new(p, vec![Term::Var(vars[i]), Term::Var(vars[j])])));
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            let mut a = random_atom(rng, &voc, &vars);
            if rng.gen_bool(0.5) {
                let k = rng.gen_range(0..a.args.len());
                a.args[k] = Term::App(fun, vars.iter().map(|&v| Term::Var(v)).collect());
                lits.push(Literal::pos(a));
            } else if rng.gen_bool(0.5) {
                lits.push(Literal::pos(a));
            } else {
                lits.push(Literal::neg(a));
            }
        }
        clauses.push(Clause::new(lits));
    }
    for _ in 0..rng.gen_range(1..=4) {
        let a = random_atom(rng, &voc, &[]);
        clauses.push(Clause::new(vec![Literal::pos(a)]));
    }
    (sig, clauses)
}

/// A query clause with at most `max_lits` literals over `max_vars`
/// variables and predicates of arity at most `max_arity`.
pub fn query_clause(rng: &mut GenRng, sig: &mut Signature, max_lits: usize, max_vars: u32, max_arity: usize) -> Clause {
    let preds: Vec<(Sym, usize)> = (0..4)
        .map(|i| {
            let a = 1 + i % max_arity;
            (sig.predicate(&format!("q{i}_{a}"), a), a)
        })
        .collect();
    let n = rng.gen_range(1..=max_lits);
    let lits = (0..n)
        .map(|_| {
            let (p, a) = *preds.choose(rng).expect("predicates");
            let args = (0..a).map(|_| Term::var(rng.gen_range(0..max_vars))).collect();
            Literal::neg(Atom::new(p, args))
        })
        .collect();
    Clause::new(lits).dedup()
}

/// Like [`query_clause`] but plants a cycle of binary literals over three
/// or four variables first, so cyclic queries are common.
pub fn cyclic_query_clause(rng: &mut GenRng, sig: &mut Signature, max_lits: usize, max_vars: u32, max_arity: usize) -> Clause {
    let len = rng.gen_range(3..=max_lits.clamp(3, 4)).min(max_vars as usize);
    let mut vars: Vec<u32> = (0..max_vars).collect();
    vars.shuffle(rng);
    let ring = &vars[..len];
    let binary: Vec<Sym> = (0..2).map(|i| sig.predicate(&format!("e{i}"), 2)).collect();
    let mut lits: Vec<Literal> = (0..len)
        .map(|k| {
            let p = *binary.choose(rng).expect("binary predicates");
            Literal::neg(Atom::new(p, vec![Term::var(ring[k]), Term::var(ring[(k + 1) % len])]))
        })
        .collect();
    if lits.len() < max_lits && rng.gen_bool(0.5) {
        let extra = query_clause(rng, sig, 1, max_vars, max_arity);
        lits.extend(extra.literals);
    }
    Clause::new(lits).dedup()
}

/// Term vocabulary for the unification and ordering law suites.
#[derive(Clone, Debug)]
pub struct TermVocabulary {
    pub functions: Vec<(Sym, usize)>,
    pub constants: Vec<Sym>,
    pub vars: u32,
}

impl TermVocabulary {
    pub fn standard(sig: &mut Signature) -> Self {
        TermVocabulary {
            functions: vec![(sig.function("f", 2), 2), (sig.function("g", 1), 1), (sig.function("h", 1), 1)],
            constants: vec![sig.constant("a"), sig.constant("b")],
            vars: 4,
        }
    }
}

pub fn term(rng: &mut GenRng, voc: &TermVocabulary, depth: usize) -> Term {
    let roll = rng.gen_range(0..10);
    if depth == 0 || roll < 3 {
        if voc.vars > 0 && rng.gen_bool(0.6) {
            Term::var(rng.gen_range(0..voc.vars))
        } else {
            Term::Const(*voc.constants.choose(rng).expect("constants"))
        }
    } else {
        let (f, n) = *voc.functions.choose(rng).expect("functions");
        Term::App(f, (0..n).map(|_| term(rng, voc, depth - 1)).collect())
    }
}

pub fn ground_term(rng: &mut GenRng, voc: &TermVocabulary, depth: usize) -> Term {
    let g = TermVocabulary { vars: 0, ..voc.clone() };
    term(rng, &g, depth)
}

/// Two terms with a known ground unifier: both generalise one ground term
/// `g` by abstracting some occurrences of `theta(v)` into `v`.
pub fn unifiable_pair(rng: &mut GenRng, voc: &TermVocabulary, depth: usize) -> (Term, Term, Vec<(Var, Term)>) {
    let g = ground_term(rng, voc, depth);
    let mut subs = Vec::new();
    collect_subterms(&g, &mut subs);
    let theta: Vec<(Var, Term)> = (0..voc.vars)
        .map(|v| (Var(v), subs.choose(rng).expect("subterms").clone()))
        .collect();
    let s = abstract_term(rng, &g, &theta);
    let t = abstract_term(rng, &g, &theta);
    (s, t, theta)
}

fn collect_subterms(t: &Term, out: &mut Vec<Term>) {
    out.push(t.clone());
    if let Term::App(_, args) = t {
        args.iter().for_each(|a| collect_subterms(a, out));
    }
}

fn abstract_term(rng: &mut GenRng, t: &Term, theta: &[(Var, Term)]) -> Term {
    let hits: Vec<Var> = theta.iter().filter(|(_, u)| u == t).map(|(v, _)| *v).collect();
    if !hits.is_empty() && rng.gen_bool(0.5) {
        return Term::Var(*hits.choose(rng).expect("hit"));
    }
    match t {
        Term::App(f, args) => Term::App(*f, args.iter().map(|a| abstract_term(rng, a, theta)).collect()),
        _ => t.clone(),
    }
}
