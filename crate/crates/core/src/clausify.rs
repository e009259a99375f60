//! Clausal normal form for guarded and loosely guarded formulas:
//! existential closure, NNF, structural renaming of universal
//! subformulas, Skolemisation and CNF.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{check_guardedness, nnf, Formula, GuardednessReport, Nnf, Verdict};
use crate::term::{Atom, Clause, Literal, Rule, Signature, Sym, Term, Var};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("formula is not (loosely) guarded")]
pub struct NotGuarded(pub GuardednessReport);

#[derive(Clone, Debug, Default)]
pub struct Clausified {
    pub clauses: Vec<Clause>,
    pub definers: Vec<Sym>,
    /// Skolem symbol together with its argument variables, as introduced.
    pub skolems: Vec<(Sym, Vec<Var>)>,
}

/// Rejects formulas outside the (loosely) guarded fragment, then clausifies.
pub fn clausify(sig: &mut Signature, f: &Formula) -> Result<Clausified, NotGuarded> {
    let report = check_guardedness(f);
    if report.verdict == Verdict::NotGuarded {
        return Err(NotGuarded(report));
    }
    Ok(clausify_unchecked(sig, f))
}

/// The transformation without the fragment check.
pub fn clausify_unchecked(sig: &mut Signature, f: &Formula) -> Clausified {
    let free: Vec<Var> = f.free_vars().into_iter().collect();
    let closed = Formula::exists(free, f.clone());
    let n = nnf(&closed);
    let mut out = Clausified::default();
    let mut roots = Vec::new();
    let main = rename_universals(sig, &n, true, &mut roots, &mut out.definers);
    roots.insert(0, main);
    for r in &roots {
        let matrix = skolemize(sig, r, &mut Vec::new(), &BTreeMap::new(), &mut out.skolems);
        for lits in cnf(&matrix) {
            let c = Clause::new(lits).dedup();
            if crate::calculus::is_tautology(&c) {
                continue;
            }
            out.clauses.push(c.normalized().with_provenance(Rule::Input, Vec::new()));
        }
    }
    out
}

/// Replaces every universal subformula outside the outermost prefix by a
/// definer atom over its free variables and queues the definition.
fn rename_universals(
    sig: &mut Signature,
    f: &Nnf,
    prefix: bool,
    roots: &mut Vec<Nnf>,
    definers: &mut Vec<Sym>,
) -> Nnf {
    match f {
        Nnf::Lit(_) | Nnf::True | Nnf::False => f.clone(),
        Nnf::And(fs) => Nnf::And(fs.iter().map(|g| rename_universals(sig, g, prefix, roots, definers)).collect()),
        Nnf::Or(fs) => Nnf::Or(fs.iter().map(|g| rename_universals(sig, g, false, roots, definers)).collect()),
        Nnf::Exists(vs, g) => Nnf::Exists(vs.clone(), Box::new(rename_universals(sig, g, false, roots, definers))),
        Nnf::Forall(vs, g) => {
            if prefix {
                return Nnf::Forall(vs.clone(), Box::new(rename_universals(sig, g, true, roots, definers)));
            }
            let args: Vec<Var> = f.free_vars().into_iter().collect();
            let d = sig.fresh_definer("d", args.len());
            definers.push(d);
            let atom = Atom::new(d, args.iter().map(|&v| Term::Var(v)).collect());
            let body = rename_universals(sig, g, true, roots, definers);
            let def = Nnf::Forall(
                args.clone(),
                Box::new(Nnf::Or(vec![
                    Nnf::Lit(Literal::neg(atom.clone())),
                    Nnf::Forall(vs.clone(), Box::new(body)),
                ])),
            );
            roots.push(def);
            Nnf::Lit(Literal::pos(atom))
        }
    }
}

/// Drops universal quantifiers and replaces existential variables by Skolem
/// terms over the universal variables in scope.
fn skolemize(
    sig: &mut Signature,
    f: &Nnf,
    scope: &mut Vec<Var>,
    subst: &BTreeMap<Var, Term>,
    skolems: &mut Vec<(Sym, Vec<Var>)>,
) -> Nnf {
    match f {
        Nnf::Lit(l) => Nnf::Lit(l.map_vars(&mut |v| subst.get(&v).cloned().unwrap_or(Term::Var(v)))),
        Nnf::True | Nnf::False => f.clone(),
        Nnf::And(fs) => Nnf::And(fs.iter().map(|g| skolemize(sig, g, scope, subst, skolems)).collect()),
        Nnf::Or(fs) => Nnf::Or(fs.iter().map(|g| skolemize(sig, g, scope, subst, skolems)).collect()),
        Nnf::Forall(vs, g) => {
            let n = scope.len();
            let mut inner = subst.clone();
            for v in vs {
                scope.push(*v);
                inner.remove(v);
            }
            let r = skolemize(sig, g, scope, &inner, skolems);
            scope.truncate(n);
            r
        }
        Nnf::Exists(vs, g) => {
            let mut inner = subst.clone();
            for v in vs {
                let sk = sig.fresh_skolem(scope.len());
                skolems.push((sk, scope.clone()));
                let t = if scope.is_empty() {
                    Term::Const(sk)
                } else {
                    Term::App(sk, scope.iter().map(|&u| Term::Var(u)).collect())
                };
                inner.insert(*v, t);
            }
            skolemize(sig, g, scope, &inner, skolems)
        }
    }
}

/// Clauses of a quantifier-free NNF formula.
fn cnf(f: &Nnf) -> Vec<Vec<Literal>> {
    match f {
        Nnf::Lit(l) => vec![vec![l.clone()]],
        Nnf::True => vec![],
        Nnf::False => vec![vec![]],
        Nnf::And(fs) => fs.iter().flat_map(cnf).collect(),
        Nnf::Or(fs) => {
            let mut acc: Vec<Vec<Literal>> = vec![vec![]];
            for g in fs {
                let part = cnf(g);
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for p in &part {
                        let mut c = a.clone();
                        c.extend(p.iter().cloned());
                        next.push(c);
                    }
                }
                acc = next;
            }
            acc
        }
        Nnf::Forall(_, g) | Nnf::Exists(_, g) => cnf(g),
    }
}

/// Every Skolem term in `clauses` has exactly the recorded argument list.
/// Used by tests of the Skolem argument rule.
pub fn skolem_arguments(clauses: &[Clause], sig: &Signature) -> BTreeMap<Sym, BTreeSet<usize>> {
    let mut out: BTreeMap<Sym, BTreeSet<usize>> = BTreeMap::new();
    for c in clauses {
        for l in &c.literals {
            let mut subs = Vec::new();
            l.atom.args.iter().for_each(|a| a.compound_subterms(&mut subs));
            for t in subs {
                if let Term::App(f, args) = t {
                    if sig.symbol(*f).origin == crate::term::Origin::Skolem {
                        out.entry(*f).or_default().insert(args.len());
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::classify;

    fn atom(sig: &mut Signature, p: &str, args: &[u32]) -> Formula {
        let s = sig.predicate(p, args.len());
        Formula::Atom(Atom::new(s, args.iter().map(|&v| Term::var(v)).collect()))
    }

    #[test]
    fn free_variable_formula_gets_a_definer() {
        let mut sig = Signature::new();
        // forall x (A(x,y) -> B(x,y)), y free
        let f = Formula::forall(
            vec![Var(0)],
            Formula::implies(atom(&mut sig, "a", &[0, 1]), atom(&mut sig, "b", &[0, 1])),
        );
        let out = clausify(&mut sig, &f).unwrap();
        let shown: Vec<String> = out.clauses.iter().map(|c| sig.show_clause(c)).collect();
        assert_eq!(shown, vec!["d1(sk1)", "~d1(X0) | ~a(X1,X0) | b(X1,X0)"]);
        assert!(out.clauses.iter().all(|c| classify(c).is_lg_or_ground()));
    }

    #[test]
    fn unguarded_formula_is_rejected() {
        let mut sig = Signature::new();
        let f = Formula::forall(vec![Var(0)], atom(&mut sig, "a", &[0]));
        assert!(clausify(&mut sig, &f).is_err());
    }
}
