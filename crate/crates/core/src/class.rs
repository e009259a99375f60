//! Clause classes (ground, guarded, loosely guarded, query) and the
//! variable structure of query clauses.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::term::{Clause, Var};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    Ground,
    /// Positions of every negative flat literal covering all variables.
    Guarded { guards: Vec<usize> },
    /// Positions of the loose guards (all negative flat literals).
    LooselyGuarded { guards: Vec<usize> },
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseClass {
    pub shape: Shape,
    pub is_query: bool,
    pub is_flat: bool,
    pub is_simple: bool,
    pub is_covering: bool,
}

impl ClauseClass {
    pub fn is_guarded(&self) -> bool {
        matches!(self.shape, Shape::Guarded { .. })
    }

    pub fn is_loosely_guarded(&self) -> bool {
        matches!(self.shape, Shape::Guarded { .. } | Shape::LooselyGuarded { .. })
    }

    pub fn is_ground(&self) -> bool {
        self.shape == Shape::Ground
    }

    /// One of the four classes the calculus handles.
    pub fn is_admissible(&self) -> bool {
        self.shape != Shape::Other || self.is_query
    }

    /// Ground, guarded or loosely guarded.
    pub fn is_lg_or_ground(&self) -> bool {
        self.shape != Shape::Other
    }
}

/// Every compound subterm has exactly the clause's variables.
pub fn is_covering(c: &Clause) -> bool {
    let all = c.vars();
    c.literals.iter().all(|l| {
        let mut subs = Vec::new();
        l.atom.args.iter().for_each(|a| a.compound_subterms(&mut subs));
        subs.iter().all(|t| t.vars() == all)
    })
}

pub fn classify(c: &Clause) -> ClauseClass {
    let is_flat = c.literals.iter().all(|l| l.atom.is_flat());
    let is_simple = c.literals.iter().all(|l| l.atom.is_simple());
    let is_covering = is_covering(c);
    let is_query = !c.is_empty() && is_flat && c.literals.iter().all(|l| !l.positive);
    let vars = c.vars();
    let shape = if !is_simple || !is_covering {
        Shape::Other
    } else if vars.is_empty() {
        Shape::Ground
    } else {
        let flat_neg: Vec<usize> = c
            .negative()
            .filter(|(_, l)| l.atom.is_flat())
            .map(|(i, _)| i)
            .collect();
        let guards: Vec<usize> = flat_neg
            .iter()
            .copied()
            .filter(|&i| c.literals[i].vars() == vars)
            .collect();
        if !guards.is_empty() {
            Shape::Guarded { guards }
        } else if loose_guard_condition(c, &flat_neg, &vars) {
            Shape::LooselyGuarded { guards: flat_neg }
        } else {
            Shape::Other
        }
    };
    ClauseClass {
        shape,
        is_query,
        is_flat,
        is_simple,
        is_covering,
    }
}

fn loose_guard_condition(c: &Clause, guards: &[usize], vars: &BTreeSet<Var>) -> bool {
    let sets: Vec<BTreeSet<Var>> = guards.iter().map(|&i| c.literals[i].vars()).collect();
    let vs: Vec<Var> = vars.iter().copied().collect();
    for (i, x) in vs.iter().enumerate() {
        if !sets.iter().any(|s| s.contains(x)) {
            return false;
        }
        for y in &vs[i + 1..] {
            if !sets.iter().any(|s| s.contains(x) && s.contains(y)) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableAnalysis {
    /// Positions of surface literals.
    pub surface: Vec<usize>,
    pub chained: BTreeSet<Var>,
    pub isolated: BTreeSet<Var>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a query clause")]
pub struct NotAQuery;

/// Surface literals and the chained/isolated split of a query clause.
pub fn variable_analysis(q: &Clause) -> Result<VariableAnalysis, NotAQuery> {
    if !classify(q).is_query {
        return Err(NotAQuery);
    }
    let sets: Vec<BTreeSet<Var>> = q.literals.iter().map(|l| l.vars()).collect();
    let surface: Vec<usize> = (0..sets.len())
        .filter(|&i| {
            (0..sets.len()).all(|j| j == i || !(sets[i].is_subset(&sets[j]) && sets[i] != sets[j]))
        })
        .collect();
    let mut chained = BTreeSet::new();
    for (a, &i) in surface.iter().enumerate() {
        for &j in &surface[a + 1..] {
            if sets[i] != sets[j] {
                chained.extend(sets[i].intersection(&sets[j]).copied());
            }
        }
    }
    let isolated = q.vars().difference(&chained).copied().collect();
    Ok(VariableAnalysis {
        surface,
        chained,
        isolated,
    })
}

/// Partition into maximal variable-connected components. Each ground literal
/// is a component of its own. Components are ordered by first literal.
pub fn split_components(c: &Clause) -> Vec<Clause> {
    let n = c.len();
    let sets: Vec<BTreeSet<Var>> = c.literals.iter().map(|l| l.vars()).collect();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut stack = vec![start];
        let mut seen_vars: BTreeSet<Var> = sets[start].clone();
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if comp[j] == usize::MAX && !sets[j].is_disjoint(&sets[i]) {
                    comp[j] = next;
                    seen_vars.extend(sets[j].iter().copied());
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    let mut out: Vec<Vec<_>> = vec![Vec::new(); next];
    for (i, l) in c.literals.iter().enumerate() {
        out[comp[i]].push(l.clone());
    }
    out.into_iter().map(Clause::new).collect()
}

/// Chained-only: no isolated variable. Isolated-only: no chained variable.
pub fn is_chained_only(va: &VariableAnalysis) -> bool {
    va.isolated.is_empty() && !va.chained.is_empty()
}

pub fn is_isolated_only(va: &VariableAnalysis) -> bool {
    va.chained.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Atom, Literal, Signature, Term};

    fn lit(pos: bool, p: crate::term::Sym, args: Vec<Term>) -> Literal {
        Literal {
            positive: pos,
            atom: Atom::new(p, args),
        }
    }

    #[test]
    fn guarded_and_query_examples() {
        let mut sig = Signature::new();
        let a = sig.predicate("a", 2);
        let b1 = sig.predicate("b", 1);
        let b2 = sig.predicate("bb", 2);
        let f = sig.function("f", 2);
        let x = Term::var(0);
        let y = Term::var(1);
        let z = Term::var(2);
        let c1 = Clause::new(vec![lit(false, a, vec![x.clone(), y.clone()]), lit(false, b1, vec![x.clone()])]);
        let k = classify(&c1);
        assert!(k.is_guarded() && k.is_query);
        let c2 = Clause::new(vec![
            lit(false, a, vec![x.clone(), y.clone()]),
            lit(true, b1, vec![Term::App(f, vec![x.clone(), y.clone()])]),
        ]);
        let k = classify(&c2);
        assert!(k.is_guarded() && !k.is_query);
        let c3 = Clause::new(vec![lit(false, a, vec![x.clone(), y.clone()]), lit(false, b2, vec![y, z])]);
        let k = classify(&c3);
        assert!(!k.is_loosely_guarded() && k.is_query);
    }

    #[test]
    fn non_covering_is_other() {
        let mut sig = Signature::new();
        let a = sig.predicate("a", 2);
        let b = sig.predicate("b", 1);
        let f = sig.function("f", 1);
        let x = Term::var(0);
        let y = Term::var(1);
        let c = Clause::new(vec![
            lit(false, a, vec![x.clone(), y]),
            lit(true, b, vec![Term::App(f, vec![x])]),
        ]);
        assert_eq!(classify(&c).shape, Shape::Other);
    }

    #[test]
    fn triangle_with_loose_guards() {
        let mut sig = Signature::new();
        let r = sig.predicate("r", 2);
        let p = sig.predicate("p", 1);
        let (x, y, z) = (Term::var(0), Term::var(1), Term::var(2));
        let c = Clause::new(vec![
            lit(false, r, vec![x.clone(), y.clone()]),
            lit(false, r, vec![y.clone(), z.clone()]),
            lit(false, r, vec![z.clone(), x.clone()]),
            lit(true, p, vec![x]),
        ]);
        assert!(matches!(classify(&c).shape, Shape::LooselyGuarded { .. }));
    }

    #[test]
    fn empty_clause_is_ground_not_query() {
        let k = classify(&Clause::empty());
        assert!(k.is_ground() && !k.is_query);
    }

    #[test]
    fn split_keeps_ground_literals_apart() {
        let mut sig = Signature::new();
        let a = sig.predicate("a", 1);
        let b = sig.predicate("b", 1);
        let c0 = sig.constant("c");
        let d = Clause::new(vec![lit(false, a, vec![Term::var(0)]), lit(false, b, vec![Term::Const(c0)])]);
        assert_eq!(split_components(&d).len(), 2);
    }
}
