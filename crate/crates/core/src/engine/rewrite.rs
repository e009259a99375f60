//! Turning a saturated clause set back into first-order sentences by
//! replacing Skolem terms with existential variables.

use std::collections::BTreeMap;

use crate::class::is_covering;
use crate::formula::{nnf, Formula};
use crate::term::{Clause, Literal, Sym, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("clause has a compound term that does not contain every clause variable")]
pub struct NonCovering;

fn disjunction(mut fs: Vec<Formula>) -> Formula {
    match fs.len() {
        0 => Formula::False,
        1 => fs.pop().expect("one disjunct"),
        _ => Formula::Or(fs),
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

/// The sentence for one clause: the negation (in NNF) of its universal
/// closure with each compound term replaced by an existential variable.
/// Literals whose compound terms share a function symbol sit under one
/// existential block.
pub fn unskolemise(c: &Clause) -> Result<Formula, NonCovering> {
    if !is_covering(c) {
        return Err(NonCovering);
    }
    let xs: Vec<Var> = c.vars().into_iter().collect();
    let mut next = c.max_var().map_or(0, |m| m + 1);
    let mut fresh: Vec<(Term, Var)> = Vec::new();
    let mut lits: Vec<(Literal, Vec<Sym>, Vec<Var>)> = Vec::new();
    for l in &c.literals {
        let mut funs = Vec::new();
        let mut ys = Vec::new();
        let args = l
            .atom
            .args
            .iter()
            .map(|t| match t {
                Term::App(f, _) => {
                    let y = match fresh.iter().find(|(s, _)| s == t) {
                        Some((_, y)) => *y,
                        None => {
                            let y = Var(next);
                            next += 1;
                            fresh.push((t.clone(), y));
                            y
                        }
                    };
                    funs.push(*f);
                    if !ys.contains(&y) {
                        ys.push(y);
                    }
                    Term::Var(y)
                }
                _ => t.clone(),
            })
            .collect();
        let mut atom = l.atom.clone();
        atom.args = args;
        let lit = Literal {
            positive: l.positive,
            atom,
        };
        lits.push((lit, funs, ys));
    }
    // Group literals that mention the same function symbol.
    let n = lits.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut owner: BTreeMap<Sym, usize> = BTreeMap::new();
    for (i, (_, funs, _)) in lits.iter().enumerate() {
        for f in funs {
            match owner.get(f) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
                None => {
                    owner.insert(*f, i);
                }
            }
        }
    }
    let mut disjuncts = Vec::new();
    let mut groups: BTreeMap<usize, (Vec<Formula>, Vec<Var>)> = BTreeMap::new();
    for i in 0..n {
        let (lit, funs, ys) = &lits[i];
        let f = if lit.positive {
            Formula::Atom(lit.atom.clone())
        } else {
            Formula::not(Formula::Atom(lit.atom.clone()))
        };
        if funs.is_empty() {
            disjuncts.push(f);
            continue;
        }
        let root = find(&mut parent, i);
        let g = groups.entry(root).or_default();
        g.0.push(f);
        for y in ys {
            if !g.1.contains(y) {
                g.1.push(*y);
            }
        }
    }
    for (_, (fs, ys)) in groups {
        disjuncts.push(Formula::exists(ys, disjunction(fs)));
    }
    let closure = Formula::forall(xs, disjunction(disjuncts));
    Ok(nnf(&Formula::not(closure)).to_formula())
}

/// One sentence per clause; together they form the union-of-queries rewriting.
pub fn unskolemise_rewrite(cs: &[Clause]) -> Result<Vec<Formula>, NonCovering> {
    cs.iter().map(unskolemise).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{default_var_name, FormulaPrinter};
    use crate::term::{Atom, Signature};

    fn show(sig: &Signature, f: &Formula) -> String {
        FormulaPrinter {
            sig,
            var_name: &default_var_name,
        }
        .show(f)
    }

    #[test]
    fn query_clause_becomes_its_bcq() {
        let mut sig = Signature::new();
        let r = sig.predicate("r", 2);
        let c = Clause::new(vec![Literal::neg(Atom::new(r, vec![Term::var(0), Term::var(1)]))]);
        assert_eq!(show(&sig, &unskolemise(&c).unwrap()), "exists X0,X1 . r(X0,X1)");
    }

    #[test]
    fn skolem_term_becomes_existential() {
        let mut sig = Signature::new();
        let g = sig.predicate("g", 1);
        let a = sig.predicate("a", 2);
        let f = sig.function("f", 1);
        let x = Term::var(0);
        let c = Clause::new(vec![
            Literal::neg(Atom::new(g, vec![x.clone()])),
            Literal::pos(Atom::new(a, vec![x.clone(), Term::App(f, vec![x])])),
        ]);
        assert_eq!(
            show(&sig, &unskolemise(&c).unwrap()),
            "exists X0 . (g(X0) & forall X1 . ~a(X0,X1))"
        );
    }

    #[test]
    fn ground_unit_is_negated() {
        let mut sig = Signature::new();
        let a = sig.predicate("a", 2);
        let (c0, c1) = (sig.constant("c0"), sig.constant("c1"));
        let c = Clause::new(vec![Literal::pos(Atom::new(a, vec![Term::Const(c0), Term::Const(c1)]))]);
        assert_eq!(show(&sig, &unskolemise(&c).unwrap()), "~a(c0,c1)");
    }
}
