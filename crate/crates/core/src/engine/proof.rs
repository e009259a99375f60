//! Proof extraction, the line-oriented proof log and step replay.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::Saturator;
use crate::calculus::{condense, execute, Inference};
use crate::subst::{is_variant, subsumes};
use crate::term::{Clause, ClauseId, Rule, Signature};

#[derive(Clone, Debug)]
pub struct ProofStep {
    pub id: ClauseId,
    pub clause: Clause,
    pub rule: Rule,
    pub parents: Vec<ClauseId>,
    pub inference: Option<Inference>,
}

/// Ancestors of a derived clause in ascending id order, ending with it.
#[derive(Clone, Debug, Default)]
pub struct Proof {
    pub steps: Vec<ProofStep>,
}

/// Serialisable view of one proof step.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub id: u32,
    pub clause: String,
    pub rule: &'static str,
    pub parents: Vec<u32>,
    pub mgu: BTreeMap<String, String>,
}

impl Proof {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.steps.iter().map(|s| &s.clause)
    }

    /// Derived steps only (inputs dropped).
    pub fn derived(&self) -> impl Iterator<Item = &ProofStep> {
        self.steps.iter().filter(|s| s.rule != Rule::Input)
    }

    fn mgu_entries(sig: &Signature, s: &ProofStep) -> BTreeMap<String, String> {
        s.inference
            .as_ref()
            .map(|inf| {
                inf.mgu
                    .iter()
                    .map(|(v, t)| (format!("X{}", v.0), sig.show_term_raw(t)))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// One line per step: `id. <clause> [rule, (parents), {mgu}]`.
    pub fn render(&self, sig: &Signature) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let parents: Vec<String> = s.parents.iter().map(|p| p.0.to_string()).collect();
            let mgu: Vec<String> = Self::mgu_entries(sig, s)
                .into_iter()
                .map(|(v, t)| format!("{v}->{t}"))
                .collect();
            out.push_str(&format!(
                "{}. {} [{}, ({}), {{{}}}]\n",
                s.id.0,
                sig.show_clause(&s.clause),
                s.rule.name(),
                parents.join(","),
                mgu.join(",")
            ));
        }
        out
    }

    pub fn records(&self, sig: &Signature) -> Vec<StepRecord> {
        self.steps
            .iter()
            .map(|s| StepRecord {
                id: s.id.0,
                clause: sig.show_clause(&s.clause),
                rule: s.rule.name(),
                parents: s.parents.iter().map(|p| p.0).collect(),
                mgu: Self::mgu_entries(sig, s),
            })
            .collect()
    }
}

/// Collects the ancestors of `goal` from the saturator's store.
pub fn extract_proof(sat: &Saturator, goal: ClauseId) -> Proof {
    let mut seen = BTreeSet::new();
    let mut stack = vec![goal];
    while let Some(id) = stack.pop() {
        if !seen.insert(id) {
            continue;
        }
        stack.extend(sat.clause(id).provenance.parents.iter().copied());
    }
    let steps = seen
        .into_iter()
        .map(|id| {
            let e = sat.entry(id);
            ProofStep {
                id,
                clause: e.clause.clone(),
                rule: e.clause.provenance.rule,
                parents: e.clause.provenance.parents.clone(),
                inference: e.inference.clone(),
            }
        })
        .collect();
    Proof { steps }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {id} ({rule}) does not replay: {reason}")]
pub struct ReplayError {
    pub id: u32,
    pub rule: &'static str,
    pub reason: String,
}

/// Re-executes every step from its premises and checks the recorded
/// conclusion up to variable renaming. Definer-introducing steps are checked
/// structurally against their parents.
pub fn replay(sig: &Signature, proof: &Proof) -> Result<(), ReplayError> {
    let by_id: BTreeMap<ClauseId, &Clause> = proof.steps.iter().map(|s| (s.id, &s.clause)).collect();
    for s in &proof.steps {
        let fail = |reason: &str| ReplayError {
            id: s.id.0,
            rule: s.rule.name(),
            reason: reason.to_string(),
        };
        let parents: Vec<&Clause> = s
            .parents
            .iter()
            .map(|p| by_id.get(p).copied().ok_or_else(|| fail("missing parent")))
            .collect::<Result<_, _>>()?;
        match s.rule {
            Rule::Input => {}
            Rule::Res | Rule::Fact | Rule::TRes => {
                let inf = s.inference.as_ref().ok_or_else(|| fail("no inference recorded"))?;
                let (c, _) = execute(&parents, &inf.pairs, &inf.removed).ok_or_else(|| fail("premises do not unify"))?;
                if !is_variant(&c.dedup(), &s.clause) {
                    return Err(fail("conclusion differs"));
                }
            }
            Rule::Conden => {
                let p = parents.first().ok_or_else(|| fail("no parent"))?;
                if !is_variant(&condense(p), &s.clause) {
                    return Err(fail("condensation differs"));
                }
            }
            Rule::Split => {
                let p = parents.first().ok_or_else(|| fail("no parent"))?;
                if !subsumes(&s.clause, p) || s.clause.len() >= p.len() {
                    return Err(fail("not a component of its parent"));
                }
            }
            Rule::Sep => {
                let p = parents.first().ok_or_else(|| fail("no parent"))?;
                let preds = p.predicates();
                let (fresh, rest): (Vec<_>, Vec<_>) = s
                    .clause
                    .literals
                    .iter()
                    .cloned()
                    .partition(|l| !preds.contains(&l.atom.pred));
                if fresh.len() != 1 || !sig.is_definer(fresh[0].atom.pred) || !subsumes(&Clause::new(rest), p) {
                    return Err(fail("not a separation of its parent"));
                }
            }
            Rule::TTrans => {
                let inf = s.inference.as_ref().ok_or_else(|| fail("no inference recorded"))?;
                let (r, _) = execute(&parents, &inf.pairs, &inf.removed).ok_or_else(|| fail("premises do not unify"))?;
                let lits = &s.clause.literals;
                let ok = (0..=lits.len()).rev().any(|k| {
                    lits[k..].iter().all(|l| sig.is_definer(l.atom.pred))
                        && subsumes(&Clause::new(lits[..k].to_vec()), &r)
                });
                if !ok {
                    return Err(fail("not a transformation of the top resolvent"));
                }
            }
        }
    }
    Ok(())
}
