//! Eligible literals: maximality, the three selection functions, top
//! variable analysis and the side-premise tuple search.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::class::{classify, Shape};
use crate::ordering::{is_maximal, lowest_literal};
use crate::subst::{Subst, Unifier};
use crate::term::{Clause, Signature, Sym, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RuleHint {
    Max,
    SelectNC,
    SelectG,
    SelectT,
}

/// Static eligibility of a clause. `SelectT` clauses get their eligible
/// literals per side-premise tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Eligibility {
    /// Nothing selected. `maximal` and `strict` are literal positions.
    Max { maximal: Vec<usize>, strict: Vec<usize> },
    /// One selected negative literal (SelectNC or SelectG).
    Selected { hint: RuleHint, lit: usize },
    Top,
}

impl Eligibility {
    pub fn hint(&self) -> RuleHint {
        match self {
            Eligibility::Max { .. } => RuleHint::Max,
            Eligibility::Selected { hint, .. } => *hint,
            Eligibility::Top => RuleHint::SelectT,
        }
    }

    /// Positions of strictly maximal positive literals, usable as side
    /// premise or positive Res premise.
    pub fn productive<'a>(&'a self, c: &'a Clause) -> impl Iterator<Item = usize> + 'a {
        let strict: &[usize] = match self {
            Eligibility::Max { strict, .. } => strict,
            _ => &[],
        };
        strict.iter().copied().filter(move |&i| c.literals[i].positive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("clause is neither ground, guarded, loosely guarded nor a query clause")]
pub struct Unclassifiable;

/// Algorithm 1 dispatch without the side-premise search.
pub fn eligibility(sig: &Signature, c: &Clause) -> Result<Eligibility, Unclassifiable> {
    let class = classify(c);
    if !class.is_admissible() {
        return Err(Unclassifiable);
    }
    let max = || {
        let maximal = (0..c.len()).filter(|&i| is_maximal(sig, c, i, false)).collect();
        let strict = (0..c.len()).filter(|&i| is_maximal(sig, c, i, true)).collect();
        Eligibility::Max { maximal, strict }
    };
    if class.shape == Shape::Ground {
        return Ok(max());
    }
    let neg_compound: Vec<usize> = c
        .negative()
        .filter(|(_, l)| l.atom.has_compound())
        .map(|(i, _)| i)
        .collect();
    if !neg_compound.is_empty() {
        let lit = lowest_literal(sig, c, &neg_compound).expect("non-empty");
        return Ok(Eligibility::Selected {
            hint: RuleHint::SelectNC,
            lit,
        });
    }
    if c.positive().any(|(_, l)| l.atom.has_compound()) {
        return Ok(max());
    }
    if let Shape::Guarded { guards } = &class.shape {
        if c.positive().next().is_some() {
            let lit = lowest_literal(sig, c, guards).expect("guarded clause has a guard");
            return Ok(Eligibility::Selected {
                hint: RuleHint::SelectG,
                lit,
            });
        }
    }
    Ok(Eligibility::Top)
}

/// A side premise: a clause and the position of its strictly maximal
/// positive literal.
#[derive(Clone, Debug)]
pub struct SidePremise {
    pub clause: Clause,
    pub lit: usize,
}

/// Result of the top-variable analysis of a main premise against a tuple.
#[derive(Clone, Debug)]
pub struct TopAnalysis {
    /// Simultaneous mgu over the whole tuple.
    pub probe_mgu: Subst,
    /// Depth of each main-premise variable under the probe mgu.
    pub var_depths: BTreeMap<Var, usize>,
    pub top_vars: BTreeSet<Var>,
    /// Positions (in the main premise) of negative literals with a top variable.
    pub top_literals: Vec<usize>,
    pub closed_sets: Vec<BTreeSet<Var>>,
    /// Positions of the main premise's negative literals, in tuple order.
    pub negative_positions: Vec<usize>,
    /// The tuple after renaming apart from the main premise and each other.
    pub renamed_side: Vec<SidePremise>,
    pub side_ids: Vec<crate::term::ClauseId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopError {
    #[error("side-premise tuple has {found} clauses, main premise has {expected} negative literals")]
    Arity { expected: usize, found: usize },
    #[error("side premise literal is not a positive literal")]
    NotPositive,
    #[error("no simultaneous unifier for the tuple")]
    NotUnifiable,
}

/// Renames each side premise apart from the main premise and from each other.
pub fn rename_tuple(main: &Clause, side: &[SidePremise]) -> Vec<SidePremise> {
    let mut next = main.max_var().map_or(0, |m| m + 1);
    side.iter()
        .map(|s| {
            let (c, n) = crate::subst::rename_apart(&s.clause, next);
            next = n;
            SidePremise {
                clause: Clause {
                    id: s.clause.id,
                    provenance: s.clause.provenance.clone(),
                    ..c
                },
                lit: s.lit,
            }
        })
        .collect()
}

/// ComputeTop: unify every negative literal of `main` with the matching
/// side-premise literal, then rank main-premise variables by depth.
pub fn compute_top(side: &[SidePremise], main: &Clause) -> Result<TopAnalysis, TopError> {
    let negative_positions: Vec<usize> = main.negative().map(|(i, _)| i).collect();
    if side.len() != negative_positions.len() {
        return Err(TopError::Arity {
            expected: negative_positions.len(),
            found: side.len(),
        });
    }
    let renamed = rename_tuple(main, side);
    let mut u = Unifier::new();
    for (s, &i) in renamed.iter().zip(&negative_positions) {
        let b = &s.clause.literals[s.lit];
        if !b.positive {
            return Err(TopError::NotPositive);
        }
        if !u.unify_atoms(&b.atom, &main.literals[i].atom) {
            return Err(TopError::NotUnifiable);
        }
    }
    let probe = u.finish();
    let mut main_vars = BTreeSet::new();
    for &i in &negative_positions {
        main_vars.extend(main.literals[i].vars());
    }
    let var_depths: BTreeMap<Var, usize> = main_vars
        .iter()
        .map(|&v| (v, probe.image(v).depth()))
        .collect();
    let max_depth = var_depths.values().copied().max().unwrap_or(0);
    let top_vars: BTreeSet<Var> = var_depths
        .iter()
        .filter(|(_, &d)| d == max_depth)
        .map(|(&v, _)| v)
        .collect();
    let top_literals: Vec<usize> = negative_positions
        .iter()
        .copied()
        .filter(|&i| main.literals[i].vars().iter().any(|v| top_vars.contains(v)))
        .collect();
    let closed_sets = closed_top_variable_sets(main, &top_vars);
    Ok(TopAnalysis {
        probe_mgu: probe,
        var_depths,
        top_vars,
        top_literals,
        closed_sets,
        negative_positions,
        side_ids: renamed.iter().map(|s| s.clause.id).collect(),
        renamed_side: renamed,
    })
}

/// The closed set reached from `x`: top variables connected to `x` through
/// literals of `q`.
pub fn closed_top_set(q: &Clause, top: &BTreeSet<Var>, x: Var) -> BTreeSet<Var> {
    let lit_vars: Vec<BTreeSet<Var>> = q.literals.iter().map(|l| l.vars()).collect();
    let mut reached = BTreeSet::new();
    let mut frontier: BTreeSet<Var> = [x].into();
    while !frontier.is_empty() {
        reached.extend(frontier.iter().copied());
        let mut found = BTreeSet::new();
        for vs in &lit_vars {
            if vs.iter().any(|v| frontier.contains(v)) {
                found.extend(vs.intersection(top).copied());
            }
        }
        frontier = found.difference(&reached).copied().collect();
    }
    reached
}

/// Partition of `top` into closed sets, each seeded by its least variable.
pub fn closed_top_variable_sets(q: &Clause, top: &BTreeSet<Var>) -> Vec<BTreeSet<Var>> {
    let mut rest = top.clone();
    let mut out = Vec::new();
    while let Some(&x) = rest.iter().next() {
        let set: BTreeSet<Var> = closed_top_set(q, &rest, x);
        rest = rest.difference(&set).copied().collect();
        out.push(set);
    }
    out
}

/// A candidate side premise indexed by predicate.
#[derive(Clone, Debug)]
pub struct Candidate<'a> {
    pub clause: &'a Clause,
    pub lit: usize,
}

/// Depth-first enumeration of full side-premise tuples for `main`.
/// `candidates(pred)` lists the productive literals with that predicate.
/// When `required` is set, only tuples using that clause id somewhere are
/// reported. `visit` returns `false` to stop the search.
pub fn for_each_tuple<'a, F, V>(main: &Clause, candidates: F, required: Option<crate::term::ClauseId>, mut visit: V)
where
    F: Fn(Sym) -> Vec<Candidate<'a>>,
    V: FnMut(&[Candidate<'a>]) -> bool,
{
    let negs: Vec<usize> = main.negative().map(|(i, _)| i).collect();
    if negs.is_empty() {
        return;
    }
    let per_lit: Vec<Vec<Candidate<'a>>> = negs
        .iter()
        .map(|&i| {
            let a = &main.literals[i].atom;
            candidates(a.pred)
                .into_iter()
                .filter(|c| c.clause.literals[c.lit].atom.args.len() == a.args.len())
                .collect()
        })
        .collect();
    if per_lit.iter().any(Vec::is_empty) {
        return;
    }
    if let Some(req) = required {
        if !per_lit.iter().any(|cs| cs.iter().any(|c| c.clause.id == req)) {
            return;
        }
    }
    let start = main.max_var().map_or(0, |m| m + 1);
    let mut chosen: Vec<Candidate<'a>> = Vec::with_capacity(negs.len());
    dfs(main, &negs, &per_lit, 0, start, &Unifier::new(), required, false, &mut chosen, &mut visit);
}

#[allow(clippy::too_many_arguments)]
fn dfs<'a, V>(
    main: &Clause,
    negs: &[usize],
    per_lit: &[Vec<Candidate<'a>>],
    k: usize,
    offset: u32,
    u: &Unifier,
    required: Option<crate::term::ClauseId>,
    has_required: bool,
    chosen: &mut Vec<Candidate<'a>>,
    visit: &mut V,
) -> bool
where
    V: FnMut(&[Candidate<'a>]) -> bool,
{
    if k == negs.len() {
        if required.is_none() || has_required {
            return visit(chosen);
        }
        return true;
    }
    // Prune when the required clause can no longer appear.
    if let Some(req) = required {
        if !has_required && !per_lit[k..].iter().any(|cs| cs.iter().any(|c| c.clause.id == req)) {
            return true;
        }
    }
    let target = &main.literals[negs[k]].atom;
    for cand in &per_lit[k] {
        let b = &cand.clause.literals[cand.lit].atom;
        let width = cand.clause.max_var().map_or(0, |m| m + 1);
        let renamed = b.map_vars(&mut |v| crate::term::Term::Var(Var(v.0 + offset)));
        let mut u2 = u.clone();
        if !u2.unify_atoms(&renamed, target) {
            continue;
        }
        chosen.push(cand.clone());
        let hit = has_required || Some(cand.clause.id) == required;
        let go_on = dfs(main, negs, per_lit, k + 1, offset + width, &u2, required, hit, chosen, visit);
        chosen.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// Eligible literal positions of `c` against `active`, with the rule hint.
/// SelectT uses the first tuple found; with no tuple every negative literal
/// is eligible.
pub fn eligible_literals(
    sig: &Signature,
    c: &Clause,
    active: &[Clause],
) -> Result<(Vec<usize>, RuleHint), Unclassifiable> {
    let e = eligibility(sig, c)?;
    Ok(match e {
        Eligibility::Max { maximal, .. } => (maximal, RuleHint::Max),
        Eligibility::Selected { hint, lit } => (vec![lit], hint),
        Eligibility::Top => {
            let index = productive_index(sig, active);
            let mut first: Option<Vec<SidePremise>> = None;
            for_each_tuple(
                c,
                |p| index.get(&p).cloned().unwrap_or_default(),
                None,
                |t| {
                    first = Some(
                        t.iter()
                            .map(|cand| SidePremise {
                                clause: cand.clause.clone(),
                                lit: cand.lit,
                            })
                            .collect(),
                    );
                    false
                },
            );
            let lits = match first.and_then(|side| compute_top(&side, c).ok()) {
                Some(ta) => ta.top_literals,
                None => c.negative().map(|(i, _)| i).collect(),
            };
            (lits, RuleHint::SelectT)
        }
    })
}

/// Productive literals of the Max-type clauses in `clauses`, by predicate.
pub fn productive_index<'a>(sig: &Signature, clauses: &'a [Clause]) -> BTreeMap<Sym, Vec<Candidate<'a>>> {
    let mut index: BTreeMap<Sym, Vec<Candidate<'a>>> = BTreeMap::new();
    for c in clauses {
        if let Ok(e) = eligibility(sig, c) {
            for lit in e.productive(c) {
                index
                    .entry(c.literals[lit].atom.pred)
                    .or_default()
                    .push(Candidate { clause: c, lit });
            }
        }
    }
    index
}
