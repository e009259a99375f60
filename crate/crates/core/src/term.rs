//! Symbols, terms, atoms, literals and clauses.
//!
//! Variables are clause-local `u32` ids. Symbols are interned in a
//! [`Signature`], which also owns the symbol precedence used by the
//! path ordering.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

/// Interned symbol id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Sym(pub u32);

/// Clause-local variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Var(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SymbolKind {
    Function,
    Constant,
    Predicate,
}

/// Where a symbol came from. Drives the default precedence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Origin {
    Input,
    Skolem,
    Definer,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub name: String,
    pub arity: usize,
    pub origin: Origin,
    /// Present only for definers; strictly decreasing in creation order.
    pub definer_rank: Option<i64>,
    /// Creation index within the symbol's (kind, origin) tier.
    index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("symbol `{name}` used as {found:?}/{found_arity} but declared as {declared:?}/{declared_arity}")]
    Conflict {
        name: String,
        declared: SymbolKind,
        declared_arity: usize,
        found: SymbolKind,
        found_arity: usize,
    },
    #[error("unknown symbol `{0}` in precedence")]
    UnknownSymbol(String),
    #[error("precedence violates function > constant > predicate at `{0}`")]
    ClassOrder(String),
}

/// Symbol table plus precedence.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, Sym>,
    tier_counts: HashMap<(u8, u8), usize>,
    definers: usize,
    skolems: usize,
    /// Explicit precedence override, highest first.
    overrides: HashMap<Sym, usize>,
}

fn kind_class(kind: SymbolKind) -> u8 {
    match kind {
        SymbolKind::Function => 2,
        SymbolKind::Constant => 1,
        SymbolKind::Predicate => 0,
    }
}

fn origin_tier(origin: Origin) -> u8 {
    match origin {
        Origin::Definer => 0,
        Origin::Input => 1,
        Origin::Skolem => 2,
    }
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, s: Sym) -> &Symbol {
        &self.symbols[s.0 as usize]
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.symbols[s.0 as usize].name
    }

    pub fn arity(&self, s: Sym) -> usize {
        self.symbols[s.0 as usize].arity
    }

    pub fn kind(&self, s: Sym) -> SymbolKind {
        self.symbols[s.0 as usize].kind
    }

    pub fn is_definer(&self, s: Sym) -> bool {
        self.symbols[s.0 as usize].origin == Origin::Definer
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.by_name.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Sym, &Symbol)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (Sym(i as u32), s))
    }

    pub fn definer_count(&self) -> usize {
        self.definers
    }

    fn push(&mut self, kind: SymbolKind, name: String, arity: usize, origin: Origin) -> Sym {
        let tier = (kind_class(kind), origin_tier(origin));
        let index = {
            let n = self.tier_counts.entry(tier).or_insert(0);
            *n += 1;
            *n - 1
        };
        let definer_rank = (origin == Origin::Definer).then(|| -(self.definers as i64) - 1);
        let id = Sym(self.symbols.len() as u32);
        self.by_name.insert(name.clone(), id);
        self.symbols.push(Symbol {
            kind,
            name,
            arity,
            origin,
            definer_rank,
            index,
        });
        id
    }

    /// Interns an input symbol, checking that name, kind and arity agree
    /// with any earlier use.
    pub fn intern(&mut self, name: &str, kind: SymbolKind, arity: usize) -> Result<Sym, SignatureError> {
        if let Some(&s) = self.by_name.get(name) {
            let sym = &self.symbols[s.0 as usize];
            if sym.kind != kind || sym.arity != arity {
                return Err(SignatureError::Conflict {
                    name: name.to_string(),
                    declared: sym.kind,
                    declared_arity: sym.arity,
                    found: kind,
                    found_arity: arity,
                });
            }
            return Ok(s);
        }
        Ok(self.push(kind, name.to_string(), arity, Origin::Input))
    }

    pub fn predicate(&mut self, name: &str, arity: usize) -> Sym {
        self.intern(name, SymbolKind::Predicate, arity)
            .unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn function(&mut self, name: &str, arity: usize) -> Sym {
        self.intern(name, SymbolKind::Function, arity)
            .unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn constant(&mut self, name: &str) -> Sym {
        self.intern(name, SymbolKind::Constant, 0)
            .unwrap_or_else(|e| panic!("{e}"))
    }

    fn fresh_name(&self, base: &str, mut k: usize) -> String {
        loop {
            let candidate = format!("{base}{k}");
            if !self.by_name.contains_key(&candidate) {
                return candidate;
            }
            k += 1;
        }
    }

    /// Fresh definer predicate, ranked below every existing predicate.
    pub fn fresh_definer(&mut self, prefix: &str, arity: usize) -> Sym {
        self.definers += 1;
        let name = self.fresh_name(prefix, self.definers);
        self.push(SymbolKind::Predicate, name, arity, Origin::Definer)
    }

    /// Fresh Skolem constant (arity 0) or function.
    pub fn fresh_skolem(&mut self, arity: usize) -> Sym {
        self.skolems += 1;
        let name = self.fresh_name("sk", self.skolems);
        let kind = if arity == 0 {
            SymbolKind::Constant
        } else {
            SymbolKind::Function
        };
        self.push(kind, name, arity, Origin::Skolem)
    }

    /// Total precedence key: larger key means greater symbol.
    pub fn prec_key(&self, s: Sym) -> (u8, u8, i64) {
        let sym = &self.symbols[s.0 as usize];
        let class = kind_class(sym.kind);
        if let Some(&pos) = self.overrides.get(&s) {
            return (class, 3, -(pos as i64));
        }
        match sym.origin {
            Origin::Definer => (class, 0, sym.definer_rank.unwrap_or(0)),
            o => (class, origin_tier(o), -(sym.index as i64)),
        }
    }

    /// `a > b` in the precedence.
    pub fn prec_greater(&self, a: Sym, b: Sym) -> bool {
        a != b && self.prec_key(a) > self.prec_key(b)
    }

    /// Installs an explicit precedence, highest symbol first. Symbols not
    /// listed keep their default rank below the listed ones of their class.
    pub fn set_precedence<S: AsRef<str>>(&mut self, order: &[S]) -> Result<(), SignatureError> {
        let mut overrides = HashMap::new();
        let mut last_class = u8::MAX;
        for (pos, name) in order.iter().enumerate() {
            let s = self
                .lookup(name.as_ref())
                .ok_or_else(|| SignatureError::UnknownSymbol(name.as_ref().to_string()))?;
            let class = kind_class(self.kind(s));
            if class > last_class {
                return Err(SignatureError::ClassOrder(name.as_ref().to_string()));
            }
            last_class = class;
            overrides.insert(s, pos);
        }
        self.overrides = overrides;
        Ok(())
    }

    /// Symbols in descending precedence.
    pub fn precedence_order(&self) -> Vec<Sym> {
        let mut all: Vec<Sym> = (0..self.symbols.len() as u32).map(Sym).collect();
        all.sort_by_key(|&s| std::cmp::Reverse(self.prec_key(s)));
        all
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(Sym),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(v: u32) -> Term {
        Term::Var(Var(v))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_compound(&self) -> bool {
        matches!(self, Term::App(..))
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn contains_var(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Flat: a variable or a constant.
    pub fn is_flat(&self) -> bool {
        !self.is_compound()
    }

    /// Simple: flat, or a compound whose arguments are all flat.
    pub fn is_simple(&self) -> bool {
        match self {
            Term::App(_, args) => args.iter().all(Term::is_flat),
            _ => true,
        }
    }

    pub fn symbol_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::symbol_count).sum::<usize>(),
        }
    }

    pub fn max_var(&self) -> Option<u32> {
        match self {
            Term::Var(v) => Some(v.0),
            Term::Const(_) => None,
            Term::App(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::Const(c) => Term::Const(*c),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    /// Every compound subterm, outermost first.
    pub fn compound_subterms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        if let Term::App(_, args) = self {
            out.push(self);
            args.iter().for_each(|a| a.compound_subterms(out));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: Sym, args: Vec<Term>) -> Self {
        Atom { pred, args }
    }

    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.args.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn is_flat(&self) -> bool {
        self.args.iter().all(Term::is_flat)
    }

    pub fn is_simple(&self) -> bool {
        self.args.iter().all(Term::is_simple)
    }

    pub fn has_compound(&self) -> bool {
        self.args.iter().any(Term::is_compound)
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Atom {
        Atom {
            pred: self.pred,
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { positive: true, atom }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { positive: false, atom }
    }

    pub fn negated(&self) -> Self {
        Literal {
            positive: !self.positive,
            atom: self.atom.clone(),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.atom.vars()
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Literal {
        Literal {
            positive: self.positive,
            atom: self.atom.map_vars(f),
        }
    }
}

/// Stable clause identifier, assigned by the engine's clause store.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClauseId(pub u32);

/// The rule that produced a clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Input,
    Res,
    TRes,
    Fact,
    Conden,
    Sep,
    TTrans,
    Split,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Input => "input",
            Rule::Res => "Res",
            Rule::TRes => "TRes",
            Rule::Fact => "Fact",
            Rule::Conden => "Conden",
            Rule::Sep => "Sep",
            Rule::TTrans => "T-Trans",
            Rule::Split => "Split",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub rule: Rule,
    pub parents: Vec<ClauseId>,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            rule: Rule::Input,
            parents: Vec::new(),
        }
    }
}

/// A multiset of literals read as a disjunction.
#[derive(Clone, Debug, Default)]
pub struct Clause {
    pub literals: Vec<Literal>,
    pub id: ClauseId,
    pub provenance: Provenance,
}

impl PartialEq for Clause {
    /// Syntactic equality of the literal sequence; ids and provenance are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.literals == other.literals
    }
}

impl Eq for Clause {}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Self {
        Clause {
            literals,
            id: ClauseId::default(),
            provenance: Provenance::default(),
        }
    }

    pub fn empty() -> Self {
        Clause::new(Vec::new())
    }

    pub fn with_provenance(mut self, rule: Rule, parents: Vec<ClauseId>) -> Self {
        self.provenance = Provenance { rule, parents };
        self
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.literals.iter().map(|l| l.atom.depth()).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for l in &self.literals {
            l.atom.args.iter().for_each(|a| a.collect_vars(&mut out));
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.literals.iter().all(|l| l.atom.is_ground())
    }

    pub fn max_var(&self) -> Option<u32> {
        self.literals
            .iter()
            .flat_map(|l| l.atom.args.iter())
            .filter_map(Term::max_var)
            .max()
    }

    /// Symbol count, the clause weight used by the given-clause heuristic.
    pub fn weight(&self) -> usize {
        self.literals
            .iter()
            .map(|l| 1 + l.atom.args.iter().map(Term::symbol_count).sum::<usize>())
            .sum()
    }

    pub fn positive(&self) -> impl Iterator<Item = (usize, &Literal)> {
        self.literals.iter().enumerate().filter(|(_, l)| l.positive)
    }

    pub fn negative(&self) -> impl Iterator<Item = (usize, &Literal)> {
        self.literals.iter().enumerate().filter(|(_, l)| !l.positive)
    }

    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Term) -> Clause {
        Clause {
            literals: self.literals.iter().map(|l| l.map_vars(f)).collect(),
            id: self.id,
            provenance: self.provenance.clone(),
        }
    }

    /// Shifts every variable by `offset`.
    pub fn shifted(&self, offset: u32) -> Clause {
        self.map_vars(&mut |v| Term::Var(Var(v.0 + offset)))
    }

    /// Renumbers variables 0, 1, ... by first occurrence.
    pub fn normalized(&self) -> Clause {
        let mut map: HashMap<Var, Var> = HashMap::new();
        self.map_vars(&mut |v| {
            let n = map.len() as u32;
            Term::Var(*map.entry(v).or_insert(Var(n)))
        })
    }

    /// Removes duplicate literal occurrences, keeping the first.
    pub fn dedup(&self) -> Clause {
        let mut out: Vec<Literal> = Vec::with_capacity(self.literals.len());
        for l in &self.literals {
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
        Clause {
            literals: out,
            id: self.id,
            provenance: self.provenance.clone(),
        }
    }

    pub fn predicates(&self) -> BTreeSet<Sym> {
        self.literals.iter().map(|l| l.atom.pred).collect()
    }
}

/// Pretty-printing against a signature.
impl Signature {
    fn write_term(&self, t: &Term, names: &mut VarNames, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(&names.name(*v)),
            Term::Const(c) => out.push_str(self.name(*c)),
            Term::App(f, args) => {
                out.push_str(self.name(*f));
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.write_term(a, names, out);
                }
                out.push(')');
            }
        }
    }

    fn write_atom(&self, a: &Atom, names: &mut VarNames, out: &mut String) {
        out.push_str(self.name(a.pred));
        if !a.args.is_empty() {
            out.push('(');
            for (i, t) in a.args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                self.write_term(t, names, out);
            }
            out.push(')');
        }
    }

    fn write_literal(&self, l: &Literal, names: &mut VarNames, out: &mut String) {
        if !l.positive {
            out.push('~');
        }
        self.write_atom(&l.atom, names, out);
    }

    pub fn show_term(&self, t: &Term) -> String {
        let mut s = String::new();
        self.write_term(t, &mut VarNames::default(), &mut s);
        s
    }

    pub fn show_atom(&self, a: &Atom) -> String {
        let mut s = String::new();
        self.write_atom(a, &mut VarNames::default(), &mut s);
        s
    }

    pub fn show_literal(&self, l: &Literal) -> String {
        let mut s = String::new();
        self.write_literal(l, &mut VarNames::default(), &mut s);
        s
    }

    /// `~p(X0) | q(f(X0))`, with variables named by first occurrence.
    /// The empty clause prints as `$false`.
    pub fn show_clause(&self, c: &Clause) -> String {
        if c.is_empty() {
            return "$false".to_string();
        }
        let mut names = VarNames::default();
        let mut s = String::new();
        for (i, l) in c.literals.iter().enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            self.write_literal(l, &mut names, &mut s);
        }
        s
    }

    /// Like [`Signature::show_clause`] but with raw variable ids, so that
    /// several printed expressions share one variable naming.
    pub fn show_clause_raw(&self, c: &Clause) -> String {
        let mut names = VarNames::raw();
        let mut s = String::new();
        for (i, l) in c.literals.iter().enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            self.write_literal(l, &mut names, &mut s);
        }
        s
    }

    pub fn show_term_raw(&self, t: &Term) -> String {
        let mut s = String::new();
        self.write_term(t, &mut VarNames::raw(), &mut s);
        s
    }
}

#[derive(Default)]
struct VarNames {
    raw: bool,
    seen: HashMap<Var, usize>,
}

impl VarNames {
    fn raw() -> Self {
        VarNames {
            raw: true,
            seen: HashMap::new(),
        }
    }

    fn name(&mut self, v: Var) -> String {
        if self.raw {
            return format!("X{}", v.0);
        }
        let n = self.seen.len();
        let k = *self.seen.entry(v).or_insert(n);
        let mut s = String::new();
        let _ = write!(s, "X{k}");
        s
    }
}
