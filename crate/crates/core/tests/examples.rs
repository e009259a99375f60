//! Replays of hand-worked derivations: loosely guarded refutation, top
//! variable analysis, the top-resolvent transformation, exhaustive query
//! separation and clausification.

mod common;

use std::collections::BTreeSet;

use common::*;
use gqe_core::calculus::{separate_exhaustively, t_res, t_trans, DefinerCache};
use gqe_core::class::{classify, variable_analysis};
use gqe_core::clausify::clausify;
use gqe_core::engine::{
    q_ar, replay, saturate, unskolemise_rewrite, Config, Mode, QarOutcome, SaturationOutcome,
};
use gqe_core::formula::{default_var_name, negate_bcq, Formula, FormulaPrinter};
use gqe_core::oracle::{clauses_have_model, formulas_have_model, gyo_acyclic};
use gqe_core::parser::parse_problem;
use gqe_core::selection::{compute_top, SidePremise};
use gqe_core::subst::is_variant;
use gqe_core::term::{Atom, Clause, Literal, Signature, Sym, SymbolKind, Term, Var};

const LOOP_CLAUSES: &str = "
~a1(X,Y) | ~a2(Y,Z) | ~a3(Z,X) | bq(X,Y,b).
a3(X,f(X)) | ~g3(X).
a2(f(X),f(X)) | ~g2(X).
a1(f(X),X) | dd(g(X)) | ~g1(X).
~bq(X,Y,b).
~dd(X).
g1(f(a)).
g3(f(a)).
g2(a).
";

const LOOP_PRECEDENCE: [&str; 12] = ["f", "g", "a", "b", "bq", "a1", "a2", "a3", "dd", "g1", "g2", "g3"];

fn loop_problem() -> (Signature, Vec<Clause>) {
    let mut sig = Signature::new();
    let cs = clauses(&mut sig, LOOP_CLAUSES);
    sig.set_precedence(&LOOP_PRECEDENCE).unwrap();
    (sig, cs)
}

#[test]
fn loosely_guarded_loop_refutes_through_expected_clauses() {
    let (mut sig, cs) = loop_problem();
    let r = saturate(&sig, &cs, &Config::default()).unwrap();
    let SaturationOutcome::Refutation(proof) = r.outcome else {
        panic!("expected a refutation");
    };
    let derived: Vec<Clause> = proof.clauses().cloned().collect();
    for want in [
        "~a2(X,X) | bq(f(X),X,b) | dd(g(X)) | ~g1(X) | ~g3(X)",
        "~a2(X,X) | dd(g(X)) | ~g1(X) | ~g3(X)",
        "~a2(X,X) | ~g1(X) | ~g3(X)",
        "~g2(a)",
    ] {
        let c = clause(&mut sig, want);
        assert!(has_variant(&derived, &c), "missing {want} in\n{}", proof.render(&sig));
    }
    assert!(derived.last().unwrap().is_empty());
    replay(&sig, &proof).unwrap();
}

#[test]
fn loop_as_query_answering() {
    let mut sig = Signature::new();
    let theory = clauses(
        &mut sig,
        "a3(X,f(X)) | ~g3(X).\na2(f(X),f(X)) | ~g2(X).\na1(f(X),X) | dd(g(X)) | ~g1(X).",
    );
    let queries = clauses(&mut sig, "~a1(X,Y) | ~a2(Y,Z) | ~a3(Z,X).\n~dd(X).");
    let data: Vec<Atom> = clauses(&mut sig, "g1(f(a)).\ng3(f(a)).\ng2(a).")
        .into_iter()
        .map(|c| c.literals[0].atom.clone())
        .collect();
    sig.set_precedence(&LOOP_PRECEDENCE[..]).ok();
    let r = q_ar(&mut sig, &theory, &queries, &data, Mode::Answer, &Config::default()).unwrap();
    assert!(r.is_yes());
    // Without the second disjunct the query is not entailed.
    let r = q_ar(&mut sig, &theory, &queries[..1], &data, Mode::Answer, &Config::default()).unwrap();
    assert!(!r.is_yes());
}

/// The images of `vars` under `ta.probe_mgu` as one atom, for comparison
/// up to renaming.
fn image_clause(sig: &mut Signature, ta: &gqe_core::selection::TopAnalysis, vars: &[Var]) -> Clause {
    let t = sig.predicate(&format!("img{}", vars.len()), vars.len());
    let args = vars.iter().map(|&v| ta.probe_mgu.image(v)).collect();
    Clause::new(vec![Literal::pos(Atom::new(t, args))])
}

fn sides(cs: &[Clause]) -> Vec<SidePremise> {
    cs.iter()
        .map(|c| SidePremise {
            clause: c.clone(),
            lit: 0,
        })
        .collect()
}

fn input_symbols(sig: &Signature) -> BTreeSet<Sym> {
    sig.symbols().map(|(s, _)| s).collect()
}

#[test]
fn single_top_variable_chain() {
    let mut sig = Signature::new();
    let side = clauses(
        &mut sig,
        "s1(X,g(X,Y)) | ~g1(X,Y).
         s5(g(X,Y),X) | p(h(X,Y)) | ~g2(X,Y).
         s3(f(X),X) | ~g3(X).
         s2(f(X),X) | ~g4(X).",
    );
    let q = named_clauses(&mut sig, "~s1(X1,X3) | ~s5(X3,X5) | ~s3(X5,X7) | ~s2(X1,X7).").remove(0);
    let ta = compute_top(&sides(&side), &q.clause).unwrap();
    let [x1, x3, x5, x7] = ["X1", "X3", "X5", "X7"].map(|n| q.var(n));

    let got = image_clause(&mut sig, &ta, &[x1, x3, x5, x7]);
    let want = clause(&mut sig, "img4(f(X),g(f(X),Y),f(X),X)");
    assert!(is_variant(&got, &want), "{}", sig.show_clause(&got));
    assert_eq!(ta.top_vars, BTreeSet::from([x3]));
    assert_eq!(ta.top_literals, vec![0, 1]);
    assert_eq!(ta.closed_sets, vec![BTreeSet::from([x3])]);

    let fixed = input_symbols(&sig);
    let r = t_res(&q.clause, &ta).unwrap().conclusion;
    let want = clause(&mut sig, "~g1(X,Y) | ~g2(X,Y) | p(h(X,Y)) | ~s3(X,Z) | ~s2(X,Z)");
    assert!(is_variant(&r, &want), "{}", sig.show_clause(&r));

    let out = t_trans(&mut sig, &mut DefinerCache::new(), &q.clause, &ta).unwrap();
    assert_eq!(out.new_definers.len(), 1);
    let mut got = out.guarded.clone();
    got.push(out.query.clone());
    let want = clauses(
        &mut sig,
        "~g1(X,Y) | ~g2(X,Y) | p(h(X,Y)) | w1(X,Y).\n~s3(X,Z) | ~s2(X,Z) | ~w1(X,Y).",
    );
    assert!(equal_modulo_naming(&sig, &got, &want, &fixed), "{}", show_all(&sig, &got));
    assert!(out.query.len() < q.clause.len());
    assert!(classify(&out.query).is_query);
    assert!(out.guarded.iter().all(|g| classify(g).is_guarded()));
}

#[test]
fn multicycle_query_two_closed_sets() {
    let mut sig = Signature::new();
    let side = clauses(
        &mut sig,
        "a1(f(X,Y),f(X,Y)) | dd1(h1(X,Y)) | ~g1(X,Y).
         a2(f(X,Y),X) | ~g2(X,Y).
         a3(f(X,Y),X) | ~g3(X,Y).
         a4(X,f(X,Z)) | ~g4(X,Z).
         a5(X,f(X,Z)) | ~g5(X,Z).
         a6(f(X,Z),f(X,Z)) | dd2(h2(X,Z)) | ~g6(X,Z).
         b(g(X)) | ~g7(X).",
    );
    let q = named_clauses(
        &mut sig,
        "~a1(X1,X2) | ~a2(X1,X3) | ~a3(X2,X3) | ~a4(X3,X4) | ~a5(X3,X5) | ~a6(X4,X5) | ~b(X3).",
    )
    .remove(0);
    let ta = compute_top(&sides(&side), &q.clause).unwrap();
    let [x1, x2, x3, x4, x5] = ["X1", "X2", "X3", "X4", "X5"].map(|n| q.var(n));

    let got = image_clause(&mut sig, &ta, &[x1, x2, x3, x4, x5]);
    let want = clause(&mut sig, "img5(f(g(X),Y),f(g(X),Y),g(X),f(g(X),Z),f(g(X),Z))");
    assert!(is_variant(&got, &want), "{}", sig.show_clause(&got));
    assert_eq!(ta.top_vars, BTreeSet::from([x1, x2, x4, x5]));
    assert_eq!(ta.closed_sets, vec![BTreeSet::from([x1, x2]), BTreeSet::from([x4, x5])]);

    let fixed = input_symbols(&sig);
    let r = t_res(&q.clause, &ta).unwrap().conclusion;
    let want = clause(
        &mut sig,
        "dd1(h1(X,Y)) | ~g1(X,Y) | ~g2(X,Y) | ~g3(X,Y) | dd2(h2(X,Z)) | ~g6(X,Z) | ~g4(X,Z) | ~g5(X,Z) | ~b(X)",
    );
    assert!(is_variant(&r, &want), "{}", sig.show_clause(&r));

    let out = t_trans(&mut sig, &mut DefinerCache::new(), &q.clause, &ta).unwrap();
    assert_eq!(out.new_definers.len(), 2);
    let mut got = out.guarded.clone();
    got.push(out.query.clone());
    let want = clauses(
        &mut sig,
        "dd1(h1(X,Y)) | ~g1(X,Y) | ~g2(X,Y) | ~g3(X,Y) | w1(X,Y).
         dd2(h2(X,Z)) | ~g4(X,Z) | ~g5(X,Z) | ~g6(X,Z) | w2(X,Z).
         ~b(X) | ~w1(X,Y) | ~w2(X,Z).",
    );
    assert!(equal_modulo_naming(&sig, &got, &want, &fixed), "{}", show_all(&sig, &got));
}

fn is_horn(c: &Clause) -> bool {
    c.positive().count() <= 1
}

#[test]
fn acyclic_query_separates_into_horn_guarded_clauses() {
    let mut sig = Signature::new();
    let q = named_clauses(&mut sig, "~a1(X1,X2) | ~b(X2,X3) | ~c(X3,X4,X5) | ~d(X5,X6) | ~e(X3,X4).").remove(0);
    let va = variable_analysis(&q.clause).unwrap();
    let vars = |ns: &[&str]| ns.iter().map(|n| q.var(n)).collect::<BTreeSet<_>>();
    assert_eq!(va.chained, vars(&["X2", "X3", "X5"]));
    assert_eq!(va.isolated, vars(&["X1", "X4", "X6"]));
    assert!(gyo_acyclic(&q.clause));

    let fixed = input_symbols(&sig);
    let sep = separate_exhaustively(&mut sig, &q.clause);
    assert!(sep.chained.is_empty());
    assert_eq!(sep.guarded.len(), 4);
    assert!(sep.guarded.iter().all(|c| is_horn(c) && classify(c).is_guarded()));
    let want = clauses(
        &mut sig,
        "~a1(X1,X2) | w1(X2).
         ~b(X2,X3) | ~w1(X2) | w2(X3).
         ~d(X5,X6) | ~w3(X5).
         ~c(X3,X4,X5) | ~e(X3,X4) | ~w2(X3) | w3(X5).",
    );
    assert!(equal_modulo_naming(&sig, &sep.guarded, &want, &fixed), "{}", show_all(&sig, &sep.guarded));
}

#[test]
fn cyclic_query_leaves_chained_residue() {
    let mut sig = Signature::new();
    let q = named_clauses(
        &mut sig,
        "~a1(X1,X2,X3) | ~b(X3,X4,X5) | ~c(X5,X6,X7) | ~d(X1,X7,X8) | ~e(X3,X4,X9).",
    )
    .remove(0);
    let va = variable_analysis(&q.clause).unwrap();
    let vars = |ns: &[&str]| ns.iter().map(|n| q.var(n)).collect::<BTreeSet<_>>();
    assert_eq!(va.chained, vars(&["X1", "X3", "X4", "X5", "X7"]));
    assert_eq!(va.isolated, vars(&["X2", "X6", "X8", "X9"]));
    assert!(!gyo_acyclic(&q.clause));

    let fixed = input_symbols(&sig);
    let sep = separate_exhaustively(&mut sig, &q.clause);
    assert_eq!(sep.guarded.len(), 5);
    assert_eq!(sep.chained.len(), 1);
    assert!(sep.guarded.iter().all(|c| is_horn(c) && classify(c).is_guarded()));
    let mut got = sep.guarded.clone();
    got.extend(sep.chained.iter().cloned());
    let want = clauses(
        &mut sig,
        "~a1(X1,X2,X3) | w1(X1,X3).
         ~d(X1,X7,X8) | w2(X1,X7).
         ~c(X5,X6,X7) | w3(X5,X7).
         ~e(X3,X4,X9) | w4(X3,X4).
         ~b(X3,X4,X5) | ~w4(X3,X4) | w5(X3,X5).
         ~w1(X1,X3) | ~w5(X3,X5) | ~w3(X5,X7) | ~w2(X1,X7).",
    );
    assert!(equal_modulo_naming(&sig, &got, &want, &fixed), "{}", show_all(&sig, &got));
}

fn theory_formula(text: &str) -> (Signature, Formula) {
    let p = parse_problem(&format!("theory.\n{text}\n")).unwrap();
    let f = p.theory().next().unwrap().value.clone();
    (p.sig, f)
}

#[test]
fn existential_with_nested_universal_clausifies() {
    let (mut sig, f) = theory_formula("exists X . (a(X,Y) & forall Z . (b(X,Z) -> exists U . c(Z,U))).");
    let fixed: BTreeSet<Sym> = sig
        .symbols()
        .filter(|(_, s)| s.kind == SymbolKind::Predicate)
        .map(|(s, _)| s)
        .collect();
    let out = clausify(&mut sig, &f).unwrap();
    assert_eq!(out.definers.len(), 1);
    let want = clauses(&mut sig, "a(k1,k2).\nw1(k1).\n~w1(X) | ~b(X,Z) | c(Z,k3(X,Z)).");
    assert!(
        equal_modulo_naming(&sig, &out.clauses, &want, &fixed),
        "{}",
        show_all(&sig, &out.clauses)
    );
    // Satisfiable and saturates without the empty clause.
    let r = saturate(&sig, &out.clauses, &Config::default()).unwrap();
    assert!(!r.is_unsat());
    assert!(clauses_have_model(&out.clauses, 2));

    // A(x,y) holds for the Skolem witnesses.
    let (qf, qsig_names) = {
        let p = parse_problem("query.\nexists X,Y . a(X,Y).\n").unwrap();
        let (item, c) = p.queries().next().map(|(i, c)| (i.clone(), c.clone())).unwrap();
        (c, item.var_names)
    };
    assert_eq!(qsig_names.len(), 2);
    let a = sig.lookup("a").unwrap();
    let q = Clause::new(vec![Literal::neg(Atom::new(a, qf.literals[0].atom.args.clone()))]);
    let r = q_ar(&mut sig, &out.clauses, &[q], &[], Mode::Answer, &Config::default()).unwrap();
    assert!(r.is_yes());
}

#[test]
fn nested_universal_under_existential_under_universal() {
    let (mut sig, f) = theory_formula("forall X . (p(X) -> exists Y . (r(X,Y) & forall Z . (r(Y,Z) -> p(Z)))).");
    let out = clausify(&mut sig, &f).unwrap();
    assert_eq!(out.definers.len(), 1);
    assert_eq!(out.skolems.len(), 1);
    let (sk, args) = &out.skolems[0];
    assert_eq!(sig.arity(*sk), 1);
    assert_eq!(args.len(), 1);
    // The definer is applied to the Skolem term f(x).
    let d = out.definers[0];
    assert!(out.clauses.iter().any(|c| c
        .literals
        .iter()
        .any(|l| l.positive && l.atom.pred == d && l.atom.args[0] == Term::App(*sk, vec![Term::var(0)]))));
    for extra in ["", "p(c0).", "p(c0). ~p(c1). r(c0,c1)."] {
        let (mut sig2, mut fs) = (Signature::new(), Vec::new());
        let text = format!(
            "theory.\nforall X . (p(X) -> exists Y . (r(X,Y) & forall Z . (r(Y,Z) -> p(Z)))).\n{}",
            extra.replace(". ", ".\n")
        );
        let p = parse_problem(&text).unwrap();
        sig2.clone_from(&p.sig);
        fs.extend(p.theory().map(|i| i.value.clone()));
        let mut cs = Vec::new();
        for f in &fs {
            cs.extend(clausify(&mut sig2, f).unwrap().clauses);
        }
        for n in 1..=2 {
            assert_eq!(formulas_have_model(&fs, n), clauses_have_model(&cs, n), "{extra} at size {n}");
        }
    }
}

#[test]
fn single_fact_saturates_to_itself() {
    let mut sig = Signature::new();
    let cs = clauses(&mut sig, "a(c0,c1).");
    let r = saturate(&sig, &cs, &Config::default()).unwrap();
    let SaturationOutcome::Saturated(set) = r.outcome else {
        panic!("expected saturation");
    };
    assert_eq!(set.len(), 1);
}

#[test]
fn rewriting_without_theory_returns_the_query() {
    let p = parse_problem("query.\nexists X . a(X).\n").unwrap();
    let mut sig = p.sig.clone();
    let q = p.queries().next().unwrap().1.clone();
    let r = q_ar(&mut sig, &[], std::slice::from_ref(&q), &[], Mode::Rewrite, &Config::default()).unwrap();
    let QarOutcome::NoWithRewriting(branches) = r.outcome else {
        panic!("expected a rewriting");
    };
    assert_eq!(branches.len(), 1);
    let all: Vec<Clause> = branches[0].clauses.iter().chain(&branches[0].residual_queries).cloned().collect();
    assert!(same_variants(&all, &[q]));
    let printer = FormulaPrinter {
        sig: &sig,
        var_name: &default_var_name,
    };
    let shown: Vec<String> = unskolemise_rewrite(&all).unwrap().iter().map(|f| printer.show(f)).collect();
    assert_eq!(shown, vec!["exists X0 . a(X0)".to_string()]);
}

#[test]
fn data_answers_query() {
    let p = parse_problem("data.\na(c0,c1).\nquery.\nexists X,Y . a(X,Y).\n").unwrap();
    let mut sig = p.sig.clone();
    let data: Vec<Atom> = p.data().cloned().collect();
    let (qf, q) = p.queries().next().map(|(i, c)| (i.value.clone(), c.clone())).unwrap();
    assert_eq!(negate_bcq(&qf).unwrap(), q);
    let r = q_ar(&mut sig, &[], &[q], &data, Mode::Answer, &Config::default()).unwrap();
    let QarOutcome::Yes(proofs) = r.outcome else {
        panic!("expected yes");
    };
    for proof in &proofs {
        replay(&sig, proof).unwrap();
    }
}
