//! `gqe`: decide satisfiability of (loosely) guarded theories, answer
//! Boolean conjunctive queries over them, or rewrite queries into
//! first-order sentences.
//!
//! Exit status: 0 on a completed run, 1 when `decide` finds the input
//! unsatisfiable, 2 on input errors and 3 when a resource bound is hit.

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use gqe_core::clausify::clausify;
use gqe_core::engine::{
    q_ar, saturate, unskolemise_rewrite, Config, EngineError, Limits, Mode, Proof, QarOutcome, SaturationOutcome,
};
use gqe_core::formula::{default_var_name, FormulaPrinter};
use gqe_core::parser::{parse_precedence, parse_problem, Problem};
use gqe_core::term::{Atom, Clause, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Satisfiability of theory, clauses and data.
    Decide,
    /// YES or NO per query.
    Answer,
    /// Rewritten sentences per query.
    Rewrite,
}

#[derive(Parser, Debug)]
#[command(name = "gqe", version, about = "Guarded query engine")]
struct Args {
    /// Problem file; standard input when absent or `-`.
    input: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "decide")]
    mode: Command,

    /// Print the clausified input and statistics.
    #[arg(long)]
    trace: bool,

    /// Print refutations step by step.
    #[arg(long)]
    proof: bool,

    /// Emit one JSON report instead of text.
    #[arg(long)]
    json: bool,

    #[arg(long, env = "GQE_MAX_CLAUSES")]
    max_clauses: Option<usize>,

    #[arg(long)]
    no_subsumption: bool,

    /// Symbol precedence, greatest first.
    #[arg(long, value_name = "FILE")]
    precedence: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Resource(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Resource(e.to_string())
    }
}

/// The clausal form of a problem.
struct Prepared {
    sig: Signature,
    theory: Vec<Clause>,
    data: Vec<Atom>,
    /// Query text and its negated clause, in source order.
    queries: Vec<(String, Clause)>,
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn prepare(problem: Problem, precedence: Option<Vec<String>>) -> Result<Prepared, Failure> {
    let mut sig = problem.sig.clone();
    if let Some(order) = precedence {
        sig.set_precedence(&order).map_err(|e| Failure::Input(format!("precedence: {e}")))?;
    }
    let mut theory = Vec::new();
    for item in problem.theory() {
        let out = clausify(&mut sig, &item.value).map_err(|e| Failure::Input(format!("{}: {e}", item.pos)))?;
        theory.extend(out.clauses);
    }
    theory.extend(problem.clauses().cloned());
    let queries = problem
        .queries()
        .map(|(item, clause)| {
            let names = &item.var_names;
            let vn = |v: gqe_core::term::Var| names.get(v.0 as usize).cloned().unwrap_or_else(|| default_var_name(v));
            let text = FormulaPrinter { sig: &problem.sig, var_name: &vn }.show(&item.value);
            (text, clause.clone())
        })
        .collect();
    Ok(Prepared {
        sig,
        theory,
        data: problem.data().cloned().collect(),
        queries,
    })
}

fn proof_json(sig: &Signature, p: &Proof) -> Value {
    json!(p.records(sig))
}

/// Text lines and the JSON report of one run, plus its exit status.
struct Report {
    text: String,
    json: Value,
    trace: String,
    status: u8,
}

fn decide(p: &Prepared, config: &Config, args: &Args) -> Result<Report, Failure> {
    let mut input = p.theory.clone();
    input.extend(p.data.iter().map(|a| Clause::new(vec![gqe_core::term::Literal::pos(a.clone())])));
    let r = saturate(&p.sig, &input, config)?;
    let mut text = String::new();
    let (verdict, proof, clauses) = match &r.outcome {
        SaturationOutcome::Refutation(proof) => {
            text.push_str("UNSAT\n");
            if args.proof {
                text.push_str(&proof.render(&p.sig));
            }
            ("UNSAT", proof_json(&p.sig, proof), Value::Null)
        }
        SaturationOutcome::Saturated(cs) => {
            text.push_str("SAT\n");
            let shown: Vec<String> = cs.iter().map(|c| p.sig.show_clause(c)).collect();
            ("SAT", Value::Null, json!(shown))
        }
    };
    Ok(Report {
        text,
        json: json!({
            "mode": "decide",
            "verdict": verdict,
            "proof": proof,
            "saturated": clauses,
            "stats": r.stats,
        }),
        trace: format!("% stats: {}\n", serde_json::to_string(&r.stats).unwrap_or_default()),
        status: if r.is_unsat() { 1 } else { 0 },
    })
}

fn queries(p: &Prepared, config: &Config, args: &Args, mode: Mode) -> Result<Report, Failure> {
    if p.queries.is_empty() {
        return Err(Failure::Input("no queries given".to_string()));
    }
    let mut text = String::new();
    let mut trace = String::new();
    let mut results = Vec::new();
    for (k, (shown, q)) in p.queries.iter().enumerate() {
        // Each query gets its own copy so definer names do not depend on
        // the queries before it.
        let mut sig = p.sig.clone();
        let r = q_ar(&mut sig, &p.theory, std::slice::from_ref(q), &p.data, mode, config)?;
        trace.push_str(&format!(
            "% stats {}: {}\n",
            k + 1,
            serde_json::to_string(&r.stats).unwrap_or_default()
        ));
        let mut entry = json!({ "query": shown, "stats": r.stats });
        match &r.outcome {
            QarOutcome::Yes(proofs) => {
                text.push_str(&format!("YES {shown}\n"));
                if args.proof {
                    for (b, pr) in proofs.iter().enumerate() {
                        text.push_str(&format!("% branch {}\n", b + 1));
                        text.push_str(&pr.render(&sig));
                    }
                }
                entry["verdict"] = json!("YES");
                entry["proofs"] = json!(proofs.iter().map(|pr| proof_json(&sig, pr)).collect::<Vec<_>>());
            }
            QarOutcome::No => {
                text.push_str(&format!("NO {shown}\n"));
                entry["verdict"] = json!("NO");
            }
            QarOutcome::NoWithRewriting(branches) => {
                text.push_str(&format!("NO {shown}\n"));
                entry["verdict"] = json!("NO");
                let mut out = Vec::new();
                for (b, br) in branches.iter().enumerate() {
                    let all: Vec<Clause> = br.clauses.iter().chain(&br.residual_queries).cloned().collect();
                    text.push_str(&format!("% branch {}\n", b + 1));
                    let (kind, lines): (&str, Vec<String>) = match unskolemise_rewrite(&all) {
                        Ok(fs) => {
                            let pr = FormulaPrinter {
                                sig: &sig,
                                var_name: &default_var_name,
                            };
                            ("sentences", fs.iter().map(|f| pr.show(f)).collect())
                        }
                        Err(_) => ("clauses", all.iter().map(|c| sig.show_clause(c)).collect()),
                    };
                    for l in &lines {
                        text.push_str(l);
                        text.push_str(".\n");
                    }
                    out.push(json!({ "kind": kind, "items": lines }));
                }
                entry["rewriting"] = json!(out);
            }
        }
        results.push(entry);
    }
    let mode_name = match mode {
        Mode::Answer => "answer",
        Mode::Rewrite => "rewrite",
    };
    Ok(Report {
        text,
        json: json!({ "mode": mode_name, "results": results }),
        trace,
        status: 0,
    })
}

fn run(args: &Args) -> Result<(String, u8), Failure> {
    let text = read_input(&args.input)?;
    let problem = parse_problem(&text).map_err(|e| Failure::Input(e.to_string()))?;
    let precedence = match &args.precedence {
        Some(path) => Some(parse_precedence(
            &fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        )),
        None => None,
    };
    let prepared = prepare(problem, precedence)?;
    let mut config = Config {
        subsumption: !args.no_subsumption,
        ..Config::default()
    };
    if let Some(n) = args.max_clauses {
        config.limits = Limits {
            max_clauses: n,
            ..config.limits
        };
    }
    let report = match args.mode {
        Command::Decide => decide(&prepared, &config, args)?,
        Command::Answer => queries(&prepared, &config, args, Mode::Answer)?,
        Command::Rewrite => queries(&prepared, &config, args, Mode::Rewrite)?,
    };
    let mut out = String::new();
    if args.json {
        out.push_str(&serde_json::to_string_pretty(&report.json).unwrap_or_default());
        out.push('\n');
    } else {
        if args.trace {
            for c in &prepared.theory {
                out.push_str(&format!("% input: {}\n", prepared.sig.show_clause(c)));
            }
        }
        out.push_str(&report.text);
        if args.trace {
            out.push_str(&report.trace);
        }
    }
    Ok((out, report.status))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok((out, status)) => {
            print!("{out}");
            ExitCode::from(status)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("gqe: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("gqe: {msg}");
            ExitCode::from(3)
        }
    }
}
