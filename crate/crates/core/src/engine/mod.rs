//! Given-clause saturation with Fact, Res and TRes, plus the query
//! answering and rewriting driver built on top of it.

mod proof;
mod qar;
mod rewrite;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::time::Instant;

use serde::Serialize;

pub use proof::{extract_proof, replay, Proof, ProofStep, ReplayError, StepRecord};
pub use qar::{q_ar, Branch, Mode, QarOutcome, QarResult, QarStats};
pub use rewrite::{unskolemise, unskolemise_rewrite, NonCovering};

use crate::calculus::{condense, factors, is_tautology, res_negative_literals, resolve_at, t_res, Inference};
use crate::ordering::maximal_literals;
use crate::selection::{compute_top, eligibility, for_each_tuple, Candidate, Eligibility, SidePremise};
use crate::subst::{is_variant, subsumes};
use crate::term::{Clause, ClauseId, Rule, Signature, Sym};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_clauses: usize,
    pub max_literals: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_clauses: 1_000_000,
            max_literals: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub limits: Limits,
    /// Forward subsumption against the active set.
    pub subsumption: bool,
    /// Fan inference generation out over the rayon pool.
    pub parallel: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            limits: Limits::default(),
            subsumption: true,
            parallel: crate::par::AVAILABLE,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Stats {
    pub generated: usize,
    pub activated: usize,
    pub deleted_tautology: usize,
    pub deleted_variant: usize,
    pub deleted_subsumed: usize,
    pub condensed: usize,
    pub inferences: usize,
    /// Derived clauses outside every admissible class; they fall back to
    /// unrestricted maximality.
    pub unclassified: usize,
    pub definers: usize,
    pub wall_ms: f64,
}

impl Stats {
    fn absorb(&mut self, o: &Stats) {
        self.generated += o.generated;
        self.activated += o.activated;
        self.deleted_tautology += o.deleted_tautology;
        self.deleted_variant += o.deleted_variant;
        self.deleted_subsumed += o.deleted_subsumed;
        self.condensed += o.condensed;
        self.inferences += o.inferences;
        self.unclassified += o.unclassified;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
}

/// A stored clause with the inference that produced it, if it was a
/// Res, Fact or TRes conclusion (or the TRes step underlying a T-Trans output).
#[derive(Clone, Debug)]
pub struct Entry {
    pub clause: Clause,
    pub inference: Option<Inference>,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Refuted(ClauseId),
    Saturated,
}

#[derive(Clone, Debug)]
pub enum SaturationOutcome {
    Refutation(Proof),
    Saturated(Vec<Clause>),
}

#[derive(Clone, Debug)]
pub struct SaturationResult {
    pub outcome: SaturationOutcome,
    pub stats: Stats,
}

impl SaturationResult {
    pub fn is_unsat(&self) -> bool {
        matches!(self.outcome, SaturationOutcome::Refutation(_))
    }
}

/// Saturates `input` and extracts a proof on refutation.
pub fn saturate(sig: &Signature, input: &[Clause], config: &Config) -> Result<SaturationResult, EngineError> {
    let start = Instant::now();
    let mut sat = Saturator::new(*config);
    for c in input {
        sat.add_input(c.clone())?;
    }
    let outcome = match sat.run(sig)? {
        Outcome::Refuted(id) => SaturationOutcome::Refutation(extract_proof(&sat, id)),
        Outcome::Saturated => SaturationOutcome::Saturated(sat.active_clauses()),
    };
    let mut stats = sat.stats.clone();
    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(SaturationResult { outcome, stats })
}

type Key = Vec<(bool, Sym, usize)>;

fn shape_key(c: &Clause) -> Key {
    let mut k: Key = c
        .literals
        .iter()
        .map(|l| (l.positive, l.atom.pred, l.atom.args.len()))
        .collect();
    k.sort();
    k
}

#[derive(Clone, Copy, Debug)]
enum Job {
    Fact,
    /// Given clause's productive literal against an eligible negative literal.
    ResPos { pi: usize, neg: ClauseId, ni: usize },
    /// Given clause's eligible negative literal against a productive literal.
    ResNeg { ni: usize, pos: ClauseId, pi: usize },
    /// Given clause is a Top main premise: every tuple.
    TopMain,
    /// Tuples of an active Top clause that use the given clause.
    TopSide { main: ClauseId },
}

/// Clause store, passive queue and indexed active set. Cloning snapshots
/// the whole state, which is how branches share prior work.
#[derive(Clone, Debug)]
pub struct Saturator {
    pub config: Config,
    pub stats: Stats,
    store: Vec<Entry>,
    passive: BinaryHeap<Reverse<(usize, u32)>>,
    active: Vec<ClauseId>,
    eligibility: HashMap<ClauseId, Eligibility>,
    productive: BTreeMap<Sym, Vec<(ClauseId, usize)>>,
    res_neg: BTreeMap<Sym, Vec<(ClauseId, usize)>>,
    top_mains: Vec<ClauseId>,
    variants: HashMap<Key, Vec<ClauseId>>,
}

impl Saturator {
    pub fn new(config: Config) -> Self {
        Saturator {
            config,
            stats: Stats::default(),
            store: Vec::new(),
            passive: BinaryHeap::new(),
            active: Vec::new(),
            eligibility: HashMap::new(),
            productive: BTreeMap::new(),
            res_neg: BTreeMap::new(),
            top_mains: Vec::new(),
            variants: HashMap::new(),
        }
    }

    pub fn clause(&self, id: ClauseId) -> &Clause {
        &self.store[id.0 as usize].clause
    }

    pub fn entry(&self, id: ClauseId) -> &Entry {
        &self.store[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    /// Every stored clause, inputs and derived, in id order.
    pub fn clauses(&self) -> impl Iterator<Item = (ClauseId, &Clause)> {
        self.store.iter().enumerate().map(|(i, e)| (ClauseId(i as u32), &e.clause))
    }

    pub fn active_ids(&self) -> &[ClauseId] {
        &self.active
    }

    pub fn active_clauses(&self) -> Vec<Clause> {
        self.active.iter().map(|&id| self.clause(id).clone()).collect()
    }

    /// Stores a clause without queueing it. Provenance is kept as given.
    pub fn record(&mut self, clause: Clause, inference: Option<Inference>) -> Result<ClauseId, EngineError> {
        let lim = self.config.limits;
        if self.store.len() >= lim.max_clauses {
            return Err(EngineError::ResourceBound(format!("more than {} clauses", lim.max_clauses)));
        }
        if clause.len() > lim.max_literals {
            return Err(EngineError::ResourceBound(format!(
                "clause with {} literals exceeds {}",
                clause.len(),
                lim.max_literals
            )));
        }
        let id = ClauseId(self.store.len() as u32);
        let mut clause = clause.dedup().normalized();
        clause.id = id;
        self.store.push(Entry { clause, inference });
        Ok(id)
    }

    pub fn enqueue(&mut self, id: ClauseId) {
        let w = self.clause(id).weight();
        self.passive.push(Reverse((w, id.0)));
    }

    pub fn add(&mut self, clause: Clause, inference: Option<Inference>) -> Result<ClauseId, EngineError> {
        let id = self.record(clause, inference)?;
        self.enqueue(id);
        Ok(id)
    }

    pub fn add_input(&mut self, clause: Clause) -> Result<ClauseId, EngineError> {
        let c = clause.with_provenance(Rule::Input, Vec::new());
        self.add(c, None)
    }

    /// Runs the given-clause loop until refutation or an empty passive set.
    pub fn run(&mut self, sig: &Signature) -> Result<Outcome, EngineError> {
        while let Some(Reverse((_, raw))) = self.passive.pop() {
            let mut id = ClauseId(raw);
            let c = self.clause(id).clone();
            let cc = condense(&c);
            if cc.len() < c.len() {
                self.stats.condensed += 1;
                id = self.record(cc.with_provenance(Rule::Conden, vec![id]), None)?;
            }
            let c = self.clause(id).clone();
            if c.is_empty() {
                return Ok(Outcome::Refuted(id));
            }
            if is_tautology(&c) {
                self.stats.deleted_tautology += 1;
                continue;
            }
            let key = shape_key(&c);
            if self
                .variants
                .get(&key)
                .is_some_and(|ids| ids.iter().any(|&a| is_variant(self.clause(a), &c)))
            {
                self.stats.deleted_variant += 1;
                continue;
            }
            if self.config.subsumption && self.forward_subsumed(&c) {
                self.stats.deleted_subsumed += 1;
                continue;
            }
            let e = eligibility(sig, &c).unwrap_or_else(|_| {
                self.stats.unclassified += 1;
                Eligibility::Max {
                    maximal: maximal_literals(sig, &c, false),
                    strict: maximal_literals(sig, &c, true),
                }
            });
            self.activate(id, key, &c, e);
            for inf in self.generate(sig, id) {
                self.stats.inferences += 1;
                self.stats.generated += 1;
                let conclusion = inf.conclusion.clone();
                let nid = self.add(conclusion, Some(inf))?;
                if self.clause(nid).is_empty() {
                    return Ok(Outcome::Refuted(nid));
                }
            }
        }
        Ok(Outcome::Saturated)
    }

    fn forward_subsumed(&self, c: &Clause) -> bool {
        let preds = c.predicates();
        self.active.iter().any(|&a| {
            let d = self.clause(a);
            d.len() <= c.len() && d.predicates().is_subset(&preds) && subsumes(d, c)
        })
    }

    fn activate(&mut self, id: ClauseId, key: Key, c: &Clause, e: Eligibility) {
        self.stats.activated += 1;
        self.active.push(id);
        self.variants.entry(key).or_default().push(id);
        for i in e.productive(c) {
            self.productive.entry(c.literals[i].atom.pred).or_default().push((id, i));
        }
        for i in res_negative_literals(c, &e) {
            self.res_neg.entry(c.literals[i].atom.pred).or_default().push((id, i));
        }
        if e == Eligibility::Top {
            self.top_mains.push(id);
        }
        self.eligibility.insert(id, e);
    }

    fn candidates(&self, pred: Sym) -> Vec<Candidate<'_>> {
        self.productive
            .get(&pred)
            .map(|v| {
                v.iter()
                    .map(|&(id, lit)| Candidate {
                        clause: self.clause(id),
                        lit,
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Side-premise tuples of `main` over the current productive literals,
    /// as `(clause id, literal)` lists. With `required`, only tuples using it.
    pub fn tuples(&self, main: &Clause, required: Option<ClauseId>) -> Vec<Vec<(ClauseId, usize)>> {
        let mut out = Vec::new();
        for_each_tuple(main, |p| self.candidates(p), required, |t| {
            out.push(t.iter().map(|c| (c.clause.id, c.lit)).collect());
            true
        });
        out
    }

    /// TRes conclusion of `main` with the given tuple, if the tuple unifies.
    pub fn top_resolvent(&self, main: &Clause, tuple: &[(ClauseId, usize)]) -> Option<Inference> {
        let side: Vec<SidePremise> = tuple
            .iter()
            .map(|&(id, lit)| SidePremise {
                clause: self.clause(id).clone(),
                lit,
            })
            .collect();
        let ta = compute_top(&side, main).ok()?;
        t_res(main, &ta)
    }

    fn jobs(&self, id: ClauseId) -> Vec<Job> {
        let c = self.clause(id);
        let e = &self.eligibility[&id];
        let mut jobs = vec![Job::Fact];
        for pi in e.productive(c) {
            let pred = c.literals[pi].atom.pred;
            for &(neg, ni) in self.res_neg.get(&pred).into_iter().flatten() {
                jobs.push(Job::ResPos { pi, neg, ni });
            }
        }
        for ni in res_negative_literals(c, e) {
            let pred = c.literals[ni].atom.pred;
            for &(pos, pi) in self.productive.get(&pred).into_iter().flatten() {
                if pos != id {
                    jobs.push(Job::ResNeg { ni, pos, pi });
                }
            }
        }
        if *e == Eligibility::Top {
            jobs.push(Job::TopMain);
        }
        if e.productive(c).next().is_some() {
            for &m in &self.top_mains {
                jobs.push(Job::TopSide { main: m });
            }
        }
        jobs
    }

    fn run_job(&self, id: ClauseId, job: Job) -> Vec<Inference> {
        let c = self.clause(id);
        match job {
            Job::Fact => factors(c, &self.eligibility[&id]),
            Job::ResPos { pi, neg, ni } => resolve_at(c, pi, self.clause(neg), ni).into_iter().collect(),
            Job::ResNeg { ni, pos, pi } => resolve_at(self.clause(pos), pi, c, ni).into_iter().collect(),
            Job::TopMain => self
                .tuples(c, None)
                .iter()
                .filter_map(|t| self.top_resolvent(c, t))
                .collect(),
            Job::TopSide { main } => {
                let m = self.clause(main);
                self.tuples(m, Some(id))
                    .iter()
                    .filter_map(|t| self.top_resolvent(m, t))
                    .collect()
            }
        }
    }

    fn generate(&self, _sig: &Signature, id: ClauseId) -> Vec<Inference> {
        let jobs = self.jobs(id);
        crate::par::map(self.config.parallel, &jobs, |&j| self.run_job(id, j))
            .into_iter()
            .flatten()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Atom, Literal, Term};

    #[test]
    fn single_fact_saturates() {
        let mut sig = Signature::new();
        let a = sig.predicate("a", 2);
        let (x, y) = (sig.constant("x0"), sig.constant("y0"));
        let c = Clause::new(vec![Literal::pos(Atom::new(a, vec![Term::Const(x), Term::Const(y)]))]);
        let r = saturate(&sig, &[c], &Config::default()).unwrap();
        match r.outcome {
            SaturationOutcome::Saturated(cs) => assert_eq!(cs.len(), 1),
            _ => panic!("expected saturation"),
        }
    }

    #[test]
    fn complementary_units_refute() {
        let mut sig = Signature::new();
        let p = sig.predicate("p", 1);
        let a = sig.constant("a");
        let at = Atom::new(p, vec![Term::Const(a)]);
        let cs = vec![Clause::new(vec![Literal::pos(at.clone())]), Clause::new(vec![Literal::neg(at)])];
        let r = saturate(&sig, &cs, &Config::default()).unwrap();
        let SaturationOutcome::Refutation(p) = r.outcome else {
            panic!("expected refutation")
        };
        replay(&sig, &p).unwrap();
    }

    #[test]
    fn clause_limit_is_reported() {
        let mut sig = Signature::new();
        let p = sig.predicate("p", 1);
        let a = sig.constant("a");
        let at = Atom::new(p, vec![Term::Const(a)]);
        let cs = vec![Clause::new(vec![Literal::pos(at.clone())]), Clause::new(vec![Literal::neg(at)])];
        let mut cfg = Config::default();
        cfg.limits.max_clauses = 2;
        assert!(matches!(saturate(&sig, &cs, &cfg), Err(EngineError::ResourceBound(_))));
    }
}
