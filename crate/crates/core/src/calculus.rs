//! Inference and simplification rules: factoring, resolution, top
//! resolution, condensation, deletion, splitting, separation and the
//! top-resolvent transformation.

use std::collections::BTreeSet;

use crate::class::{classify, split_components, variable_analysis};
use crate::ordering::literal_greater;
use crate::selection::{Eligibility, SidePremise, TopAnalysis};
use crate::subst::{is_variant, match_into, rename_apart, variant_renaming, Subst, Unifier};
use crate::term::{Atom, Clause, ClauseId, Literal, Rule, Signature, Sym, Term, Var};

/// One recorded inference. `pairs` lists the unified literal occurrences as
/// `(premise index, literal position)`; `removed` the occurrences dropped
/// from the conclusion. Premises are renamed apart in order before use.
#[derive(Clone, Debug)]
pub struct Inference {
    pub rule: Rule,
    pub premises: Vec<ClauseId>,
    pub pairs: Vec<((usize, usize), (usize, usize))>,
    pub removed: Vec<(usize, usize)>,
    pub conclusion: Clause,
    pub mgu: Subst,
}

/// Renames each premise apart from the previous ones.
pub fn rename_premises(premises: &[&Clause]) -> Vec<Clause> {
    let mut next = 0;
    premises
        .iter()
        .map(|c| {
            let (r, n) = rename_apart(c, next);
            next = n;
            r
        })
        .collect()
}

/// Executes a pair/removal description over renamed premises.
pub fn execute(
    premises: &[&Clause],
    pairs: &[((usize, usize), (usize, usize))],
    removed: &[(usize, usize)],
) -> Option<(Clause, Subst)> {
    let renamed = rename_premises(premises);
    let mut u = Unifier::new();
    for &((p, i), (q, j)) in pairs {
        if !u.unify_atoms(&renamed[p].literals[i].atom, &renamed[q].literals[j].atom) {
            return None;
        }
    }
    let s = u.finish();
    let mut lits = Vec::new();
    for (p, c) in renamed.iter().enumerate() {
        for (i, l) in c.literals.iter().enumerate() {
            if !removed.contains(&(p, i)) {
                lits.push(s.apply_literal(l));
            }
        }
    }
    Some((Clause::new(lits), s))
}

fn infer(
    rule: Rule,
    premises: &[&Clause],
    pairs: Vec<((usize, usize), (usize, usize))>,
    removed: Vec<(usize, usize)>,
) -> Option<Inference> {
    let (conclusion, mgu) = execute(premises, &pairs, &removed)?;
    let ids: Vec<ClauseId> = premises.iter().map(|c| c.id).collect();
    Some(Inference {
        rule,
        conclusion: conclusion.with_provenance(rule, ids.clone()),
        premises: ids,
        pairs,
        removed,
        mgu,
    })
}

/// All factors of `c` on a maximal positive literal. Requires that nothing
/// is selected in `c`.
pub fn factors(c: &Clause, e: &Eligibility) -> Vec<Inference> {
    let Eligibility::Max { maximal, .. } = e else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &i in maximal {
        if !c.literals[i].positive {
            continue;
        }
        for (j, l) in c.positive() {
            if j == i || l.atom.pred != c.literals[i].atom.pred {
                continue;
            }
            if let Some(inf) = infer(Rule::Fact, &[c], vec![((0, i), (0, j))], vec![(0, j)]) {
                out.push(inf);
            }
        }
    }
    out
}

/// First factor of `c`, if any.
pub fn factor(sig: &Signature, c: &Clause) -> Option<Clause> {
    let e = crate::selection::eligibility(sig, c).ok()?;
    factors(c, &e).into_iter().next().map(|i| i.conclusion)
}

/// Binary resolution between the productive literal `pi` of `pos` and the
/// eligible negative literal `ni` of `neg`.
pub fn resolve_at(pos: &Clause, pi: usize, neg: &Clause, ni: usize) -> Option<Inference> {
    if !pos.literals[pi].positive || neg.literals[ni].positive {
        return None;
    }
    if pos.literals[pi].atom.pred != neg.literals[ni].atom.pred {
        return None;
    }
    infer(
        Rule::Res,
        &[pos, neg],
        vec![((0, pi), (1, ni))],
        vec![(0, pi), (1, ni)],
    )
}

/// Negative literals of `c` eligible for binary resolution.
pub fn res_negative_literals(c: &Clause, e: &Eligibility) -> Vec<usize> {
    match e {
        Eligibility::Max { maximal, .. } => maximal
            .iter()
            .copied()
            .filter(|&i| !c.literals[i].positive)
            .collect(),
        Eligibility::Selected { lit, .. } => vec![*lit],
        Eligibility::Top => Vec::new(),
    }
}

/// First resolvent of `pos` and `neg` under their eligibility.
pub fn resolve(sig: &Signature, pos: &Clause, neg: &Clause) -> Option<Clause> {
    let ep = crate::selection::eligibility(sig, pos).ok()?;
    let en = crate::selection::eligibility(sig, neg).ok()?;
    for pi in ep.productive(pos) {
        for ni in res_negative_literals(neg, &en) {
            if let Some(inf) = resolve_at(pos, pi, neg, ni) {
                return Some(inf.conclusion);
            }
        }
    }
    None
}

/// Top resolution of `main` against the tuple analysed in `ta`. Only the
/// top literals are resolved; the other negative literals are kept.
pub fn t_res(main: &Clause, ta: &TopAnalysis) -> Option<Inference> {
    let mut premises: Vec<&Clause> = vec![main];
    let mut pairs = Vec::new();
    let mut removed = Vec::new();
    for &t in &ta.top_literals {
        let k = ta.negative_positions.iter().position(|&p| p == t)?;
        let side: &SidePremise = &ta.renamed_side[k];
        premises.push(&side.clause);
        let idx = premises.len() - 1;
        pairs.push(((idx, side.lit), (0, t)));
        removed.push((idx, side.lit));
        removed.push((0, t));
    }
    // Side remainders first, then what is left of the main premise.
    let mut inf = infer(Rule::TRes, &premises, pairs, removed)?;
    let n_main = main.len() - ta.top_literals.len();
    let lits = std::mem::take(&mut inf.conclusion.literals);
    let (main_part, side_part) = lits.split_at(n_main);
    inf.conclusion.literals = side_part.iter().chain(main_part).cloned().collect();
    Some(inf)
}

/// Removes one literal at a time while the clause maps into the rest.
pub fn condense(c: &Clause) -> Clause {
    let mut cur = c.dedup();
    'outer: loop {
        for i in 0..cur.len() {
            let mut rest = cur.literals.clone();
            rest.remove(i);
            if match_into(&cur.literals, &rest).is_some() {
                cur.literals = rest;
                continue 'outer;
            }
        }
        return cur;
    }
}

pub fn is_tautology(c: &Clause) -> bool {
    c.literals.iter().enumerate().any(|(i, l)| {
        c.literals[i + 1..]
            .iter()
            .any(|m| m.positive != l.positive && m.atom == l.atom)
    })
}

pub fn is_variant_redundant<'a>(c: &Clause, set: impl IntoIterator<Item = &'a Clause>) -> bool {
    set.into_iter().any(|d| is_variant(c, d))
}

/// Split into variable-disjoint components; `None` when indecomposable.
pub fn split(c: &Clause) -> Option<Vec<Clause>> {
    let parts = split_components(c);
    (parts.len() > 1).then_some(parts)
}

/// Outcome of a separation step.
#[derive(Clone, Debug)]
pub struct SepOutcome {
    /// Carries the positive definer literal.
    pub kept: Clause,
    /// Starts with the negative definer literal.
    pub emitted: Clause,
    pub definer: Sym,
}

fn ordered_vars(lits: &[&Literal], within: &BTreeSet<Var>) -> Vec<Var> {
    let mut out = Vec::new();
    for l in lits {
        for v in l.atom.args.iter().flat_map(|t| {
            let mut vs = Vec::new();
            collect_ordered(t, &mut vs);
            vs
        }) {
            if within.contains(&v) && !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

fn collect_ordered(t: &Term, out: &mut Vec<Var>) {
    match t {
        Term::Var(v) => {
            if !out.contains(v) {
                out.push(*v)
            }
        }
        Term::Const(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| collect_ordered(a, out)),
    }
}

fn definer_atom(d: Sym, args: &[Var]) -> Atom {
    Atom::new(d, args.iter().map(|&v| Term::Var(v)).collect())
}

/// Query-directed separation: cut off one surface literal that mixes
/// isolated and chained variables, together with the literals it covers.
/// Its isolated variables then no longer occur in the remainder.
pub fn separate_query(sig: &mut Signature, q: &Clause) -> Option<SepOutcome> {
    let va = variable_analysis(q).ok()?;
    let mut best: Option<(usize, usize)> = None;
    for &i in &va.surface {
        let vs = q.literals[i].vars();
        let iso = vs.intersection(&va.isolated).count();
        let chained = vs.intersection(&va.chained).count();
        if iso > 0 && chained > 0 && best.is_none_or(|(_, b)| iso > b) {
            best = Some((i, iso));
        }
    }
    let (a, _) = best?;
    let a_vars = q.literals[a].vars();
    let mut c_part = vec![a];
    let mut d_part = Vec::new();
    for (i, l) in q.literals.iter().enumerate() {
        if i == a {
            continue;
        }
        if l.vars().is_subset(&a_vars) {
            c_part.push(i);
        } else {
            d_part.push(i);
        }
    }
    c_part.sort_unstable();
    Some(separate_parts(sig, q, &c_part, &d_part, "ds"))
}

fn separate_parts(sig: &mut Signature, c: &Clause, c_part: &[usize], d_part: &[usize], prefix: &str) -> SepOutcome {
    let c_lits: Vec<&Literal> = c_part.iter().map(|&i| &c.literals[i]).collect();
    let d_lits: Vec<&Literal> = d_part.iter().map(|&i| &c.literals[i]).collect();
    let d_vars: BTreeSet<Var> = d_lits.iter().flat_map(|l| l.vars()).collect();
    let shared = ordered_vars(&c_lits, &d_vars);
    let definer = sig.fresh_definer(prefix, shared.len());
    let datom = definer_atom(definer, &shared);
    let mut kept: Vec<Literal> = c_lits.into_iter().cloned().collect();
    kept.push(Literal::pos(datom.clone()));
    let mut emitted = vec![Literal::neg(datom)];
    emitted.extend(d_lits.into_iter().cloned());
    SepOutcome {
        kept: Clause::new(kept).with_provenance(Rule::Sep, vec![c.id]),
        emitted: Clause::new(emitted).with_provenance(Rule::Sep, vec![c.id]),
        definer,
    }
}

/// Generic separation into `C ∨ d(x̄)` and `~d(x̄) ∨ D` for the first
/// partition with mutually non-inclusive, overlapping variable sets.
pub fn separate_generic(sig: &mut Signature, c: &Clause) -> Option<SepOutcome> {
    let n = c.len();
    if n < 2 || split(c).is_some() {
        return None;
    }
    let sets: Vec<BTreeSet<Var>> = c.literals.iter().map(|l| l.vars()).collect();
    let union = |mask: u64| -> BTreeSet<Var> {
        (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .flat_map(|i| sets[i].iter().copied())
            .collect()
    };
    let masks: Box<dyn Iterator<Item = u64>> = if n <= 16 {
        Box::new(1..(1u64 << n) - 1)
    } else {
        Box::new((0..n).map(|i| 1u64 << i))
    };
    for mask in masks {
        let (a, b) = (union(mask), union(!mask & ((1u64 << n) - 1)));
        if !a.is_subset(&b) && !b.is_subset(&a) && !a.is_disjoint(&b) {
            let cp: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let dp: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
            return Some(separate_parts(sig, c, &cp, &dp, "ds"));
        }
    }
    None
}

/// Reuses a definer for variant remainders.
#[derive(Clone, Debug, Default)]
pub struct DefinerCache {
    entries: Vec<(Clause, Sym)>,
}

impl DefinerCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Definer atom for `remainder`. Arguments follow first occurrence.
    fn atom_for(&mut self, sig: &mut Signature, remainder: &Clause) -> (Atom, bool) {
        let all = remainder.vars();
        let refs: Vec<&Literal> = remainder.literals.iter().collect();
        let args = ordered_vars(&refs, &all);
        for (stored, d) in &self.entries {
            if let Some(theta) = variant_renaming(stored, remainder) {
                let srefs: Vec<&Literal> = stored.literals.iter().collect();
                let sargs = ordered_vars(&srefs, &stored.vars());
                let mapped = sargs.iter().map(|&v| theta.image(v)).collect();
                return (Atom::new(*d, mapped), false);
            }
        }
        let d = sig.fresh_definer("dt", args.len());
        self.entries.push((remainder.clone(), d));
        (definer_atom(d, &args), true)
    }
}

/// Result of the top-resolvent transformation.
#[derive(Clone, Debug)]
pub struct TTransOutcome {
    /// Remainder clauses, each ending with its positive definer literal.
    pub guarded: Vec<Clause>,
    /// The query part followed by the negative definer literals.
    pub query: Clause,
    /// Definers created by this call (reused ones excluded).
    pub new_definers: Vec<Sym>,
    /// The undivided top resolvent.
    pub resolvent: Inference,
}

/// Top resolution followed by the transformation that replaces each closed
/// top-variable set's side remainders by a definer.
pub fn t_trans(
    sig: &mut Signature,
    cache: &mut DefinerCache,
    main: &Clause,
    ta: &TopAnalysis,
) -> Option<TTransOutcome> {
    let resolvent = t_res(main, ta)?;
    let sigma = &resolvent.mgu;
    // Main premise is premise 0 and was renamed apart by `execute`; redo the
    // same renaming to instantiate its literals consistently.
    let renamed = rename_premises(&std::iter::once(main).chain(ta.top_literals.iter().map(|&t| {
        let k = ta.negative_positions.iter().position(|&p| p == t).unwrap();
        &ta.renamed_side[k].clause
    })).collect::<Vec<_>>());
    let mut guarded = Vec::new();
    let mut new_definers = Vec::new();
    let mut negs = Vec::new();
    for set in &ta.closed_sets {
        let mut rem = Vec::new();
        for (n, &t) in ta.top_literals.iter().enumerate() {
            if !main.literals[t].vars().iter().any(|v| set.contains(v)) {
                continue;
            }
            let k = ta.negative_positions.iter().position(|&p| p == t).unwrap();
            let side = &renamed[n + 1];
            for (i, l) in side.literals.iter().enumerate() {
                if i != ta.renamed_side[k].lit {
                    rem.push(sigma.apply_literal(l));
                }
            }
        }
        if rem.is_empty() {
            continue;
        }
        let rem = Clause::new(rem);
        let (atom, fresh) = cache.atom_for(sig, &rem);
        if fresh {
            new_definers.push(atom.pred);
        }
        let mut g = rem.literals;
        g.push(Literal::pos(atom.clone()));
        guarded.push(Clause::new(g).with_provenance(Rule::TTrans, resolvent.premises.clone()));
        negs.push(Literal::neg(atom));
    }
    let mut q: Vec<Literal> = renamed[0]
        .literals
        .iter()
        .enumerate()
        .filter(|(i, _)| !ta.top_literals.contains(i))
        .map(|(_, l)| sigma.apply_literal(l))
        .collect();
    q.extend(negs);
    Some(TTransOutcome {
        guarded,
        query: Clause::new(q).with_provenance(Rule::TTrans, resolvent.premises.clone()),
        new_definers,
        resolvent,
    })
}

/// Ground, guarded or loosely guarded, so no transformation is needed.
pub fn needs_t_trans(r: &Clause) -> bool {
    !classify(r).is_lg_or_ground()
}

/// Greater-or-equal check used by tests of the literal ordering.
pub fn literal_geq(sig: &Signature, a: &Literal, b: &Literal) -> bool {
    a == b || literal_greater(sig, a, b)
}

/// Result of separating a query clause as far as possible.
#[derive(Clone, Debug, Default)]
pub struct Separation {
    /// Sep products plus isolated-only residues, all guarded.
    pub guarded: Vec<Clause>,
    /// Residues that still have chained variables.
    pub chained: Vec<Clause>,
    pub definers: usize,
}

/// Exhaustive Conden, Split and query-directed Sep on `q`.
pub fn separate_exhaustively(sig: &mut Signature, q: &Clause) -> Separation {
    let mut out = Separation::default();
    let mut work = vec![q.clone()];
    while let Some(c) = work.pop() {
        let c = condense(&c);
        if let Some(parts) = split(&c) {
            work.extend(parts.into_iter().rev());
            continue;
        }
        if let Some(sep) = separate_query(sig, &c) {
            out.definers += 1;
            out.guarded.push(sep.kept);
            work.push(sep.emitted);
            continue;
        }
        match variable_analysis(&c) {
            Ok(va) if !crate::class::is_isolated_only(&va) => out.chained.push(c),
            _ => out.guarded.push(c),
        }
    }
    out
}
