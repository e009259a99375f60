//! Query answering and rewriting: separation of query clauses, theory
//! saturation, then top resolution with the transformation against the
//! saturated set, one depth-first branch per Split.

use std::collections::{BTreeSet, VecDeque};
use std::time::Instant;

use serde::Serialize;

use super::{extract_proof, Config, EngineError, Outcome, Proof, Saturator, Stats};
use crate::calculus::{condense, needs_t_trans, separate_query, split, t_trans, DefinerCache};
use crate::class::{classify, is_isolated_only, variable_analysis};
use crate::formula::Formula;
use crate::selection::{compute_top, SidePremise};
use crate::subst::is_variant;
use crate::term::{Atom, Clause, ClauseId, Literal, Rule, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Stop at the first open branch.
    Answer,
    /// Explore every branch and report each open one.
    Rewrite,
}

/// An open branch: its saturated clause set (theory, data and query
/// descendants) plus the chained-only query clauses left over.
#[derive(Clone, Debug)]
pub struct Branch {
    pub clauses: Vec<Clause>,
    pub residual_queries: Vec<Clause>,
    /// Filled in rewrite mode.
    pub sentences: Vec<Formula>,
}

#[derive(Clone, Debug)]
pub enum QarOutcome {
    /// Every branch was refuted; one proof per branch.
    Yes(Vec<Proof>),
    /// Some branch saturated without the empty clause.
    No,
    NoWithRewriting(Vec<Branch>),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct QarStats {
    pub saturation: Stats,
    pub branches: usize,
    pub sep_definers: usize,
    pub t_trans_definers: usize,
    pub top_resolutions: usize,
    pub wall_ms: f64,
}

impl QarStats {
    pub fn definers(&self) -> usize {
        self.sep_definers + self.t_trans_definers
    }
}

#[derive(Clone, Debug)]
pub struct QarResult {
    pub outcome: QarOutcome,
    pub stats: QarStats,
}

impl QarResult {
    pub fn is_yes(&self) -> bool {
        matches!(self.outcome, QarOutcome::Yes(_))
    }
}

#[derive(Clone, Debug)]
struct State {
    sat: Saturator,
    pending: VecDeque<ClauseId>,
    chained: Vec<ClauseId>,
    cache: DefinerCache,
    seen_queries: Vec<Clause>,
    seen_tuples: BTreeSet<(ClauseId, Vec<(ClauseId, usize)>)>,
}

enum End {
    Refuted(Box<State>, ClauseId),
    Open(Box<State>),
    Split(Vec<State>),
}

/// Runs the procedure on `theory` and `data` with the query clauses
/// `queries` (negated BCQs).
pub fn q_ar(
    sig: &mut Signature,
    theory: &[Clause],
    queries: &[Clause],
    data: &[Atom],
    mode: Mode,
    config: &Config,
) -> Result<QarResult, EngineError> {
    let start = Instant::now();
    let mut sat = Saturator::new(*config);
    for c in theory {
        sat.add_input(c.clone())?;
    }
    for a in data {
        sat.add_input(Clause::new(vec![Literal::pos(a.clone())]))?;
    }
    let mut pending = VecDeque::new();
    for q in queries {
        pending.push_back(sat.record(q.clone().with_provenance(Rule::Input, Vec::new()), None)?);
    }
    let root = State {
        sat,
        pending,
        chained: Vec::new(),
        cache: DefinerCache::new(),
        seen_queries: Vec::new(),
        seen_tuples: BTreeSet::new(),
    };

    let mut stats = QarStats::default();
    let mut stack = vec![root];
    let mut proofs = Vec::new();
    let mut open = Vec::new();
    while let Some(state) = stack.pop() {
        match run_branch(sig, state, &mut stats)? {
            End::Refuted(s, id) => {
                stats.branches += 1;
                stats.saturation.absorb(&s.sat.stats);
                proofs.push(extract_proof(&s.sat, id));
            }
            End::Open(s) => {
                stats.branches += 1;
                stats.saturation.absorb(&s.sat.stats);
                open.push(s);
                if mode == Mode::Answer {
                    break;
                }
            }
            End::Split(children) => stack.extend(children.into_iter().rev()),
        }
    }
    let outcome = if open.is_empty() {
        QarOutcome::Yes(proofs)
    } else if mode == Mode::Answer {
        QarOutcome::No
    } else {
        let branches = open
            .into_iter()
            .map(|s| {
                let clauses = s.sat.active_clauses();
                let residual_queries: Vec<Clause> = s.chained.iter().map(|&q| s.sat.clause(q).clone()).collect();
                let sentences = clauses
                    .iter()
                    .chain(&residual_queries)
                    .filter_map(|c| super::unskolemise(c).ok())
                    .collect();
                Branch {
                    clauses,
                    residual_queries,
                    sentences,
                }
            })
            .collect();
        QarOutcome::NoWithRewriting(branches)
    };
    stats.saturation.definers = stats.definers();
    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(QarResult { outcome, stats })
}

fn run_branch(sig: &mut Signature, mut st: State, stats: &mut QarStats) -> Result<End, EngineError> {
    loop {
        while let Some(mut qid) = st.pending.pop_front() {
            let q = st.sat.clause(qid).clone();
            if st.seen_queries.iter().any(|s| is_variant(s, &q)) {
                continue;
            }
            st.seen_queries.push(q.clone());
            let cq = condense(&q);
            if cq.len() < q.len() {
                qid = st.sat.record(cq.with_provenance(Rule::Conden, vec![qid]), None)?;
            }
            let q = st.sat.clause(qid).clone();
            if q.is_empty() {
                return Ok(End::Refuted(Box::new(st), qid));
            }
            if let Some(parts) = split(&q) {
                let mut children = Vec::new();
                for part in parts {
                    let mut child = st.clone();
                    let pid = child.sat.record(part.with_provenance(Rule::Split, vec![qid]), None)?;
                    child.pending.push_front(pid);
                    children.push(child);
                }
                return Ok(End::Split(children));
            }
            let class = classify(&q);
            if !class.is_query {
                st.sat.enqueue(qid);
                continue;
            }
            if let Some(sep) = separate_query(sig, &q) {
                stats.sep_definers += 1;
                let kept = st.sat.record(sep.kept.with_provenance(Rule::Sep, vec![qid]), None)?;
                st.sat.enqueue(kept);
                let emitted = st.sat.record(sep.emitted.with_provenance(Rule::Sep, vec![qid]), None)?;
                st.pending.push_front(emitted);
                continue;
            }
            let va = variable_analysis(&q).expect("query clause");
            // Loosely guarded residues resolve without the transformation.
            if is_isolated_only(&va) || class.is_lg_or_ground() {
                st.sat.enqueue(qid);
            } else {
                st.chained.push(qid);
            }
        }

        if let Outcome::Refuted(id) = st.sat.run(sig)? {
            return Ok(End::Refuted(Box::new(st), id));
        }
        if st.chained.is_empty() {
            return Ok(End::Open(Box::new(st)));
        }

        let mut progressed = false;
        for qi in 0..st.chained.len() {
            let qid = st.chained[qi];
            let main = st.sat.clause(qid).clone();
            for tuple in st.sat.tuples(&main, None) {
                if !st.seen_tuples.insert((qid, tuple.clone())) {
                    continue;
                }
                let side: Vec<SidePremise> = tuple
                    .iter()
                    .map(|&(id, lit)| SidePremise {
                        clause: st.sat.clause(id).clone(),
                        lit,
                    })
                    .collect();
                let Ok(ta) = compute_top(&side, &main) else {
                    continue;
                };
                let Some(res) = crate::calculus::t_res(&main, &ta) else {
                    continue;
                };
                stats.top_resolutions += 1;
                progressed = true;
                if !needs_t_trans(&res.conclusion) {
                    let c = res.conclusion.clone();
                    let id = st.sat.record(c, Some(res))?;
                    route(&mut st, id);
                    continue;
                }
                let out = t_trans(sig, &mut st.cache, &main, &ta).expect("resolvent exists");
                stats.t_trans_definers += out.new_definers.len();
                for g in out.guarded {
                    let id = st.sat.record(g, Some(out.resolvent.clone()))?;
                    st.sat.enqueue(id);
                }
                let qn = st.sat.record(out.query, Some(out.resolvent.clone()))?;
                st.pending.push_back(qn);
            }
        }
        if !progressed {
            return Ok(End::Open(Box::new(st)));
        }
    }
}

/// Query clauses go back through separation; anything else is saturated.
fn route(st: &mut State, id: ClauseId) {
    let c = st.sat.clause(id);
    if c.is_empty() || classify(c).is_query {
        st.pending.push_back(id);
    } else {
        st.sat.enqueue(id);
    }
}
