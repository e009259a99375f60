//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use gqe_core::parser::{parse_into, Entry};
use gqe_core::subst::is_variant;
use gqe_core::term::{Atom, Clause, Literal, Signature, Sym, Term, Var};

/// A clause together with its source variable names.
pub struct Named {
    pub clause: Clause,
    pub names: Vec<String>,
}

impl Named {
    pub fn var(&self, name: &str) -> Var {
        let i = self
            .names
            .iter()
            .position(|n| n == name)
            .unwrap_or_else(|| panic!("no variable {name}"));
        Var(i as u32)
    }
}

pub fn named_clauses(sig: &mut Signature, text: &str) -> Vec<Named> {
    let src = format!("clauses.\n{text}\n");
    parse_into(sig, &src)
        .unwrap_or_else(|e| panic!("{e}"))
        .into_iter()
        .filter_map(|e| match e {
            Entry::Clause(item) => Some(Named {
                clause: item.value,
                names: item.var_names,
            }),
            _ => None,
        })
        .collect()
}

/// Clauses written one per line in the input grammar.
pub fn clauses(sig: &mut Signature, text: &str) -> Vec<Clause> {
    named_clauses(sig, text).into_iter().map(|n| n.clause).collect()
}

pub fn clause(sig: &mut Signature, text: &str) -> Clause {
    let mut cs = clauses(sig, &format!("{text}."));
    assert_eq!(cs.len(), 1, "expected one clause in {text}");
    cs.pop().expect("one clause")
}

pub fn has_variant(set: &[Clause], c: &Clause) -> bool {
    set.iter().any(|d| is_variant(d, c))
}

/// Same clauses up to variable renaming, ignoring duplicates.
pub fn same_variants(a: &[Clause], b: &[Clause]) -> bool {
    a.iter().all(|c| has_variant(b, c)) && b.iter().all(|c| has_variant(a, c))
}

pub fn show_all(sig: &Signature, cs: &[Clause]) -> String {
    cs.iter().map(|c| sig.show_clause(c)).collect::<Vec<_>>().join("\n")
}

fn symbols_of_term(t: &Term, out: &mut BTreeSet<Sym>) {
    match t {
        Term::Var(_) => {}
        Term::Const(c) => {
            out.insert(*c);
        }
        Term::App(f, args) => {
            out.insert(*f);
            args.iter().for_each(|a| symbols_of_term(a, out));
        }
    }
}

pub fn symbols(cs: &[Clause]) -> BTreeSet<Sym> {
    let mut out = BTreeSet::new();
    for c in cs {
        for l in &c.literals {
            out.insert(l.atom.pred);
            l.atom.args.iter().for_each(|a| symbols_of_term(a, &mut out));
        }
    }
    out
}

fn rename_term(t: &Term, m: &BTreeMap<Sym, Sym>) -> Term {
    let r = |s: &Sym| *m.get(s).unwrap_or(s);
    match t {
        Term::Var(_) => t.clone(),
        Term::Const(c) => Term::Const(r(c)),
        Term::App(f, args) => Term::App(r(f), args.iter().map(|a| rename_term(a, m)).collect()),
    }
}

pub fn rename_symbols(c: &Clause, m: &BTreeMap<Sym, Sym>) -> Clause {
    Clause::new(
        c.literals
            .iter()
            .map(|l| Literal {
                positive: l.positive,
                atom: Atom::new(
                    *m.get(&l.atom.pred).unwrap_or(&l.atom.pred),
                    l.atom.args.iter().map(|a| rename_term(a, m)).collect(),
                ),
            })
            .collect(),
    )
}

/// Equal up to variable renaming and a bijective renaming of the symbols
/// outside `fixed` (definers and Skolem symbols), respecting kind and arity.
pub fn equal_modulo_naming(sig: &Signature, got: &[Clause], want: &[Clause], fixed: &BTreeSet<Sym>) -> bool {
    let free_got: Vec<Sym> = symbols(got).difference(fixed).copied().collect();
    let free_want: Vec<Sym> = symbols(want).difference(fixed).copied().collect();
    if free_got.len() != free_want.len() {
        return false;
    }
    let mut used = vec![false; free_want.len()];
    let mut m = BTreeMap::new();
    search(sig, got, want, &free_got, &free_want, &mut used, &mut m)
}

fn search(
    sig: &Signature,
    got: &[Clause],
    want: &[Clause],
    free_got: &[Sym],
    free_want: &[Sym],
    used: &mut [bool],
    m: &mut BTreeMap<Sym, Sym>,
) -> bool {
    let k = m.len();
    if k == free_got.len() {
        let renamed: Vec<Clause> = got.iter().map(|c| rename_symbols(c, m)).collect();
        return same_variants(&renamed, want);
    }
    let s = free_got[k];
    for (j, &t) in free_want.iter().enumerate() {
        if used[j] || sig.kind(s) != sig.kind(t) || sig.arity(s) != sig.arity(t) {
            continue;
        }
        used[j] = true;
        m.insert(s, t);
        if search(sig, got, want, free_got, free_want, used, m) {
            return true;
        }
        m.remove(&s);
        used[j] = false;
    }
    false
}
