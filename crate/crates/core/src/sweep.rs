//! Batch suites over generated inputs: agreement with the ground oracle,
//! closure of the derived clause classes, acyclicity against separation,
//! and the algebraic laws of unification and the path ordering.
//!
//! Every case is seeded from `(seed, index)` so a failing case can be
//! reproduced on its own.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::calculus::{condense, separate_exhaustively};
use crate::class::classify;
use crate::engine::{q_ar, Config, EngineError, Mode, QarOutcome, Saturator};
use crate::gen::{self, GenRng};
use crate::oracle::{entails, gyo_acyclic};
use crate::ordering::lpo_greater;
use crate::par;
use crate::subst::{mgu, Subst};
use crate::term::{Clause, Signature, Term, Var};

fn case_rng(seed: u64, i: usize) -> GenRng {
    gen::rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64))
}

/// Definers allowed for an input with `universals` universal subformulas
/// and `query_literals` query literals.
pub fn definer_budget(universals: usize, query_literals: usize) -> usize {
    universals + 2 * query_literals
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BudgetReport {
    pub runs: usize,
    pub violations: Vec<String>,
    pub max_definers: usize,
}

impl BudgetReport {
    fn check(&mut self, label: String, definers: usize, budget: usize) {
        self.runs += 1;
        self.max_definers = self.max_definers.max(definers);
        if definers > budget {
            self.violations.push(format!("{label}: {definers} definers > budget {budget}"));
        }
    }

    fn merge(&mut self, o: BudgetReport) {
        self.runs += o.runs;
        self.violations.extend(o.violations);
        self.max_definers = self.max_definers.max(o.max_definers);
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AgreementReport {
    pub cases: usize,
    pub agree: usize,
    pub entailed: usize,
    pub disagreements: Vec<String>,
    pub errors: Vec<String>,
    pub budget: BudgetReport,
    pub wall_ms: f64,
}

/// Query answering against the ground oracle on `n` function-free guarded
/// instances.
pub fn oracle_agreement(n: usize, seed: u64, config: &Config) -> AgreementReport {
    let start = Instant::now();
    let idx: Vec<usize> = (0..n).collect();
    let inner = Config {
        parallel: false,
        ..*config
    };
    let results = par::map(config.parallel, &idx, |&i| {
        let mut rng = case_rng(seed, i);
        let inst = gen::function_free_instance(&mut rng, 4);
        let mut osig = inst.sig.clone();
        let expected = entails(&mut osig, &inst.clauses, &inst.data, &inst.query_clause);
        let mut sig = inst.sig.clone();
        let got = q_ar(
            &mut sig,
            &inst.clauses,
            std::slice::from_ref(&inst.query_clause),
            &inst.data,
            Mode::Answer,
            &inner,
        );
        let budget = definer_budget(inst.universals, inst.query_clause.len());
        (i, expected, got.map(|r| r.is_yes()), sig.definer_count(), budget)
    });
    let mut rep = AgreementReport {
        cases: n,
        ..Default::default()
    };
    for (i, expected, got, definers, budget) in results {
        rep.budget.check(format!("agreement case {i}"), definers, budget);
        match (expected, got) {
            (Ok(e), Ok(g)) => {
                rep.entailed += usize::from(e);
                if e == g {
                    rep.agree += 1;
                } else {
                    rep.disagreements.push(format!("case {i}: oracle {e}, engine {g}"));
                }
            }
            (Err(e), _) => rep.errors.push(format!("case {i}: oracle: {e}")),
            (_, Err(e)) => rep.errors.push(format!("case {i}: engine: {e}")),
        }
    }
    rep.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    rep
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClosureReport {
    pub inputs: usize,
    pub derived: usize,
    pub other: Vec<String>,
    pub too_deep: Vec<String>,
    pub too_many_vars: Vec<String>,
    pub resource_bound: usize,
    pub budget: BudgetReport,
}

impl ClosureReport {
    pub fn ok(&self) -> bool {
        self.other.is_empty() && self.too_deep.is_empty() && self.too_many_vars.is_empty()
    }

    fn check(&mut self, sig: &Signature, label: &str, c: &Clause, var_bound: usize) {
        self.derived += 1;
        let class = classify(c);
        if !class.is_admissible() {
            self.other.push(format!("{label}: {}", sig.show_clause(c)));
        }
        if c.depth() > 1 {
            self.too_deep.push(format!("{label}: {}", sig.show_clause(c)));
        }
        if c.vars().len() > var_bound {
            self.too_many_vars.push(format!("{label}: {}", sig.show_clause(c)));
        }
    }
}

fn var_bound<'a>(cs: impl IntoIterator<Item = &'a Clause>) -> usize {
    cs.into_iter().map(|c| c.vars().len()).max().unwrap_or(0)
}

/// Saturates `n` generated inputs (guarded sentences with Skolem functions,
/// loosely guarded clause sets, and query answering instances in rewrite
/// mode) and checks every derived clause.
pub fn closure(n: usize, seed: u64, config: &Config) -> ClosureReport {
    let idx: Vec<usize> = (0..n).collect();
    let inner = Config {
        parallel: false,
        ..*config
    };
    let parts = par::map(config.parallel, &idx, |&i| {
        let mut rng = case_rng(seed ^ 0xc105, i);
        let mut rep = ClosureReport {
            inputs: 1,
            ..Default::default()
        };
        let label = format!("closure case {i}");
        match i % 3 {
            0 | 1 => {
                let (sig, input, universals) = if i % 3 == 0 {
                    let (sig, fs, cs) = gen::guarded_clause_set(&mut rng);
                    let u = fs.iter().map(|f| f.universal_count()).sum();
                    (sig, cs, u)
                } else {
                    let (sig, cs) = gen::loosely_guarded_clause_set(&mut rng);
                    (sig, cs, 0)
                };
                rep.budget.check(label.clone(), sig.definer_count(), definer_budget(universals, 0));
                let bound = var_bound(&input);
                let mut sat = Saturator::new(inner);
                let mut run = || -> Result<(), EngineError> {
                    for c in &input {
                        sat.add_input(c.clone())?;
                    }
                    sat.run(&sig).map(|_| ())
                };
                if run().is_err() {
                    rep.resource_bound += 1;
                }
                for (_, c) in sat.clauses().skip(input.len()) {
                    rep.check(&sig, &label, c, bound);
                }
            }
            _ => {
                let inst = gen::function_free_instance(&mut rng, 4);
                let mut sig = inst.sig.clone();
                let bound = var_bound(inst.clauses.iter().chain([&inst.query_clause]));
                match q_ar(
                    &mut sig,
                    &inst.clauses,
                    std::slice::from_ref(&inst.query_clause),
                    &inst.data,
                    Mode::Rewrite,
                    &inner,
                ) {
                    Ok(r) => {
                        let derived: Vec<Clause> = match r.outcome {
                            QarOutcome::Yes(proofs) => proofs.iter().flat_map(|p| p.derived().map(|s| s.clause.clone())).collect(),
                            QarOutcome::NoWithRewriting(bs) => bs
                                .into_iter()
                                .flat_map(|b| b.clauses.into_iter().chain(b.residual_queries))
                                .collect(),
                            QarOutcome::No => Vec::new(),
                        };
                        for c in &derived {
                            rep.check(&sig, &label, c, bound);
                        }
                    }
                    Err(_) => rep.resource_bound += 1,
                }
                rep.budget.check(
                    label,
                    sig.definer_count(),
                    definer_budget(inst.universals, inst.query_clause.len()),
                );
            }
        }
        rep
    });
    let mut rep = ClosureReport::default();
    for p in parts {
        rep.inputs += p.inputs;
        rep.derived += p.derived;
        rep.other.extend(p.other);
        rep.too_deep.extend(p.too_deep);
        rep.too_many_vars.extend(p.too_many_vars);
        rep.resource_bound += p.resource_bound;
        rep.budget.merge(p.budget);
    }
    rep
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GyoReport {
    pub queries: usize,
    pub acyclic: usize,
    pub mismatches: Vec<String>,
    pub budget: BudgetReport,
}

/// Acyclicity by GYO reduction against "exhaustive separation leaves no
/// chained residue" on `n` random query clauses.
pub fn gyo_equivalence(n: usize, seed: u64, parallel: bool) -> GyoReport {
    let idx: Vec<usize> = (0..n).collect();
    let results = par::map(parallel, &idx, |&i| {
        let mut rng = case_rng(seed ^ 0x6a0, i);
        let mut sig = Signature::new();
        let q = if i % 2 == 0 {
            gen::query_clause(&mut rng, &mut sig, 4, 5, 3)
        } else {
            gen::cyclic_query_clause(&mut rng, &mut sig, 4, 5, 3)
        };
        let expected = gyo_acyclic(&condense(&q));
        let sep = separate_exhaustively(&mut sig, &q);
        let got = sep.chained.is_empty();
        let shown = sig.show_clause(&q);
        (i, shown, q.len(), expected, got, sig.definer_count())
    });
    let mut rep = GyoReport {
        queries: n,
        ..Default::default()
    };
    for (i, shown, len, expected, got, definers) in results {
        rep.acyclic += usize::from(expected);
        rep.budget.check(format!("gyo case {i}"), definers, definer_budget(0, len));
        if expected != got {
            rep.mismatches.push(format!("case {i}: {shown}: gyo {expected}, separation {got}"));
        }
    }
    rep
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LawReport {
    pub cases: usize,
    /// Cases where the law's premise held, per law.
    pub exercised: BTreeMap<&'static str, usize>,
    pub violations: BTreeMap<&'static str, Vec<String>>,
}

impl LawReport {
    pub fn ok(&self) -> bool {
        self.violations.values().all(Vec::is_empty)
    }

    fn law(&mut self, name: &'static str, premise: bool, holds: impl FnOnce() -> bool, what: impl FnOnce() -> String) {
        let slot = self.violations.entry(name).or_default();
        if premise {
            *self.exercised.entry(name).or_default() += 1;
            if !holds() {
                slot.push(what());
            }
        }
    }

    fn merge(&mut self, o: LawReport) {
        self.cases += o.cases;
        for (k, v) in o.exercised {
            *self.exercised.entry(k).or_default() += v;
        }
        for (k, v) in o.violations {
            self.violations.entry(k).or_default().extend(v);
        }
    }
}

fn compose_apply(theta: &[(Var, Term)], t: &Term) -> Term {
    let mut s = Subst::new();
    for (v, u) in theta {
        s.bind(*v, u.clone());
    }
    s.apply(t)
}

/// Unification laws on `n` pairs with a known ground unifier and `n`
/// unrelated pairs: the mgu unifies, is idempotent, and is more general
/// than the known unifier; unifiable pairs always get an mgu.
pub fn mgu_laws(n: usize, seed: u64, parallel: bool) -> LawReport {
    let idx: Vec<usize> = (0..n).collect();
    let parts = par::map(parallel, &idx, |&i| {
        let mut rng = case_rng(seed ^ 0x3u64, i);
        let mut sig = Signature::new();
        let voc = gen::TermVocabulary::standard(&mut sig);
        let mut rep = LawReport {
            cases: 1,
            ..Default::default()
        };
        let (s, t, theta) = gen::unifiable_pair(&mut rng, &voc, 3);
        let show = |a: &Term, b: &Term| format!("{} =? {}", sig.show_term_raw(a), sig.show_term_raw(b));
        let sigma = mgu(&[(s.clone(), t.clone())]);
        rep.law("exists", true, || sigma.is_some(), || show(&s, &t));
        if let Some(sigma) = &sigma {
            rep.law("unifies", true, || sigma.apply(&s) == sigma.apply(&t), || show(&s, &t));
            rep.law(
                "idempotent",
                true,
                || sigma.iter().all(|(_, u)| sigma.apply(u) == *u),
                || show(&s, &t),
            );
            rep.law(
                "most_general",
                true,
                || {
                    (0..voc.vars).all(|v| {
                        let x = Term::var(v);
                        compose_apply(&theta, &sigma.apply(&x)) == compose_apply(&theta, &x)
                    })
                },
                || show(&s, &t),
            );
        }
        // Unrelated pair: whatever comes back must be an idempotent unifier.
        let a = gen::term(&mut rng, &voc, 3);
        let b = gen::term(&mut rng, &voc, 3);
        if let Some(sigma) = mgu(&[(a.clone(), b.clone())]) {
            rep.law("unifies", true, || sigma.apply(&a) == sigma.apply(&b), || show(&a, &b));
            rep.law(
                "idempotent",
                true,
                || sigma.iter().all(|(_, u)| sigma.apply(u) == *u),
                || show(&a, &b),
            );
        }
        rep
    });
    let mut rep = LawReport::default();
    parts.into_iter().for_each(|p| rep.merge(p));
    rep
}

fn proper_subterms(t: &Term, out: &mut Vec<Term>) {
    if let Term::App(_, args) = t {
        for a in args {
            out.push(a.clone());
            proper_subterms(a, out);
        }
    }
}

/// Ordering laws on `n` random triples: irreflexive, transitive, subterm
/// property, stable under ground substitution, total on distinct ground
/// terms.
pub fn lpo_laws(n: usize, seed: u64, parallel: bool) -> LawReport {
    let idx: Vec<usize> = (0..n).collect();
    let parts = par::map(parallel, &idx, |&i| {
        let mut rng = case_rng(seed ^ 0x1b0, i);
        let mut sig = Signature::new();
        let voc = gen::TermVocabulary::standard(&mut sig);
        let mut rep = LawReport {
            cases: 1,
            ..Default::default()
        };
        let s = gen::term(&mut rng, &voc, 3);
        let mut below_s = Vec::new();
        proper_subterms(&s, &mut below_s);
        let t = match below_s.choose(&mut rng) {
            Some(x) if rng.gen_bool(0.5) => x.clone(),
            _ => gen::term(&mut rng, &voc, 3),
        };
        // Drawing u below t makes the transitivity premise common.
        let mut below = Vec::new();
        proper_subterms(&t, &mut below);
        let u = match below.choose(&mut rng) {
            Some(x) if rng.gen_bool(0.5) => x.clone(),
            _ => gen::term(&mut rng, &voc, 3),
        };
        let gt = |a: &Term, b: &Term| lpo_greater(&sig, a, b);
        let show = |ts: &[&Term]| ts.iter().map(|x| sig.show_term_raw(x)).collect::<Vec<_>>().join(" ; ");
        rep.law("irreflexive", true, || !gt(&s, &s), || show(&[&s]));
        rep.law(
            "transitive",
            gt(&s, &t) && gt(&t, &u),
            || gt(&s, &u),
            || show(&[&s, &t, &u]),
        );
        let mut subs = Vec::new();
        proper_subterms(&s, &mut subs);
        rep.law(
            "subterm",
            !subs.is_empty(),
            || subs.iter().all(|x| gt(&s, x)),
            || show(&[&s]),
        );
        let theta: Vec<(Var, Term)> = (0..voc.vars)
            .map(|v| (Var(v), gen::ground_term(&mut rng, &voc, 2)))
            .collect();
        rep.law(
            "liftable",
            gt(&s, &t),
            || gt(&compose_apply(&theta, &s), &compose_apply(&theta, &t)),
            || show(&[&s, &t]),
        );
        let g1 = gen::ground_term(&mut rng, &voc, 3);
        let g2 = gen::ground_term(&mut rng, &voc, 3);
        rep.law(
            "ground_total",
            g1 != g2,
            || gt(&g1, &g2) != gt(&g2, &g1),
            || show(&[&g1, &g2]),
        );
        rep
    });
    let mut rep = LawReport::default();
    parts.into_iter().for_each(|p| rep.merge(p));
    rep
}
