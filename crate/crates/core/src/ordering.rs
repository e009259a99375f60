//! Lexicographic path ordering over terms and atoms, and the induced
//! literal ordering with `~A > A`.

use std::cmp::Ordering;

use crate::term::{Atom, Clause, Literal, Signature, Sym, Term, Var};

/// A term or atom seen as a symbol applied to arguments.
#[derive(Clone, Copy)]
enum Node<'a> {
    Var(Var),
    App(Sym, &'a [Term]),
}

fn node(t: &Term) -> Node<'_> {
    match t {
        Term::Var(v) => Node::Var(*v),
        Term::Const(c) => Node::App(*c, &[]),
        Term::App(f, args) => Node::App(*f, args),
    }
}

fn node_contains(n: Node<'_>, v: Var) -> bool {
    match n {
        Node::Var(w) => w == v,
        Node::App(_, args) => args.iter().any(|a| a.contains_var(v)),
    }
}

fn node_eq(a: Node<'_>, b: Node<'_>) -> bool {
    match (a, b) {
        (Node::Var(x), Node::Var(y)) => x == y,
        (Node::App(f, xs), Node::App(g, ys)) => f == g && xs == ys,
        _ => false,
    }
}

fn greater(sig: &Signature, s: Node<'_>, t: Node<'_>) -> bool {
    let Node::App(f, ss) = s else {
        return false;
    };
    match t {
        Node::Var(v) => node_contains(s, v),
        Node::App(g, ts) => {
            // Some argument of s dominates t.
            if ss
                .iter()
                .any(|si| node_eq(node(si), t) || greater(sig, node(si), t))
            {
                return true;
            }
            if f == g {
                // Lexicographic on arguments, s must dominate every argument of t.
                for (si, ti) in ss.iter().zip(ts) {
                    if si == ti {
                        continue;
                    }
                    return greater(sig, node(si), node(ti))
                        && ts.iter().all(|tj| greater(sig, s, node(tj)));
                }
                false
            } else {
                sig.prec_greater(f, g) && ts.iter().all(|tj| greater(sig, s, node(tj)))
            }
        }
    }
}

/// `s >lpo t` on terms.
pub fn lpo_greater(sig: &Signature, s: &Term, t: &Term) -> bool {
    greater(sig, node(s), node(t))
}

/// `a >lpo b` on atoms with the predicate as root symbol.
pub fn atom_greater(sig: &Signature, a: &Atom, b: &Atom) -> bool {
    greater(sig, Node::App(a.pred, &a.args), Node::App(b.pred, &b.args))
}

/// Literal ordering: atoms by LPO, and `~A > A` on identical atoms.
pub fn literal_greater(sig: &Signature, l: &Literal, m: &Literal) -> bool {
    if l.atom == m.atom {
        return !l.positive && m.positive;
    }
    atom_greater(sig, &l.atom, &m.atom)
}

/// Partial comparison of terms; `None` when incomparable.
pub fn lpo_compare(sig: &Signature, s: &Term, t: &Term) -> Option<Ordering> {
    if s == t {
        Some(Ordering::Equal)
    } else if lpo_greater(sig, s, t) {
        Some(Ordering::Greater)
    } else if lpo_greater(sig, t, s) {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// Positions of the maximal literals of `c` (strictly maximal when `strict`).
pub fn maximal_literals(sig: &Signature, c: &Clause, strict: bool) -> Vec<usize> {
    (0..c.len())
        .filter(|&i| is_maximal(sig, c, i, strict))
        .collect()
}

/// Maximality of the literal at position `i`, checked against every other
/// literal occurrence.
pub fn is_maximal(sig: &Signature, c: &Clause, i: usize, strict: bool) -> bool {
    let l = &c.literals[i];
    c.literals.iter().enumerate().all(|(j, m)| {
        j == i || !(literal_greater(sig, m, l) || (strict && m == l))
    })
}

/// Position of the least literal among `candidates`, used for deterministic
/// selection. Incomparable literals fall back to position order.
pub fn lowest_literal(sig: &Signature, c: &Clause, candidates: &[usize]) -> Option<usize> {
    candidates
        .iter()
        .copied()
        .find(|&i| {
            candidates
                .iter()
                .all(|&j| j == i || !literal_greater(sig, &c.literals[i], &c.literals[j]))
        })
        .or_else(|| candidates.first().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subterm_and_precedence() {
        let mut sig = Signature::new();
        let f = sig.function("f", 1);
        let g = sig.function("g", 1);
        let a = sig.constant("a");
        let x = Term::var(0);
        let fx = Term::App(f, vec![x.clone()]);
        assert!(lpo_greater(&sig, &fx, &x));
        assert!(!lpo_greater(&sig, &x, &fx));
        let ga = Term::App(g, vec![Term::Const(a)]);
        let fa = Term::App(f, vec![Term::Const(a)]);
        assert!(lpo_greater(&sig, &fa, &ga));
        // f(x) and g(y) are incomparable: f(x) cannot dominate y.
        let gy = Term::App(g, vec![Term::var(1)]);
        assert_eq!(lpo_compare(&sig, &fx, &gy), None);
        assert_eq!(lpo_compare(&sig, &fx, &ga), Some(std::cmp::Ordering::Greater));
    }

    #[test]
    fn negative_literal_dominates_its_atom() {
        let mut sig = Signature::new();
        let g1 = sig.predicate("g1", 1);
        let f = sig.function("f", 1);
        let a = sig.constant("a");
        let at = Atom::new(g1, vec![Term::App(f, vec![Term::Const(a)])]);
        assert!(literal_greater(&sig, &Literal::neg(at.clone()), &Literal::pos(at.clone())));
        assert!(!literal_greater(&sig, &Literal::pos(at.clone()), &Literal::neg(at)));
    }

    #[test]
    fn compound_literal_is_maximal_in_guarded_clause() {
        let mut sig = Signature::new();
        let f = sig.function("f", 1);
        let a3 = sig.predicate("a3", 2);
        let g3 = sig.predicate("g3", 1);
        let x = Term::var(0);
        let c = Clause::new(vec![
            Literal::pos(Atom::new(a3, vec![x.clone(), Term::App(f, vec![x.clone()])])),
            Literal::neg(Atom::new(g3, vec![x])),
        ]);
        assert_eq!(maximal_literals(&sig, &c, true), vec![0]);
    }
}
