//! Problem files: `theory.`, `query.`, `data.` and `clauses.` sections of
//! period-terminated items, plus the matching pretty-printer.
//!
//! ```text
//! theory.
//! forall X . (p(X) -> exists Y . r(X,Y)).
//! data.
//! p(c0).
//! query.
//! exists X,Y . r(X,Y).
//! ```

use std::fmt;

use crate::formula::{negate_bcq, Formula, FormulaPrinter};
use crate::term::{Atom, Clause, Literal, Signature, SymbolKind, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax(String),
    /// A name used with two arities or in two symbol classes.
    Symbol(String),
    UnknownDirective(String),
    NotGround,
    NotQuery(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {}", describe(.kind))]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ErrorKind,
}

fn describe(k: &ErrorKind) -> String {
    match k {
        ErrorKind::Syntax(m) => format!("syntax error: {m}"),
        ErrorKind::Symbol(m) => format!("symbol error: {m}"),
        ErrorKind::UnknownDirective(d) => format!("unknown directive `{d}`"),
        ErrorKind::NotGround => "data items must be ground atoms".to_string(),
        ErrorKind::NotQuery(m) => format!("not a conjunctive query: {m}"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Theory,
    Query,
    Data,
    Clauses,
}

impl Section {
    fn keyword(self) -> &'static str {
        match self {
            Section::Theory => "theory",
            Section::Query => "query",
            Section::Data => "data",
            Section::Clauses => "clauses",
        }
    }

    fn from_keyword(s: &str) -> Option<Section> {
        Some(match s {
            "theory" => Section::Theory,
            "query" => Section::Query,
            "data" => Section::Data,
            "clauses" => Section::Clauses,
            _ => return None,
        })
    }
}

/// One parsed item with the source names of its variables (`Var(i)` is
/// `var_names[i]`).
#[derive(Clone, Debug)]
pub struct Item<T> {
    pub value: T,
    pub var_names: Vec<String>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum Entry {
    Theory(Item<Formula>),
    /// The query formula together with its negation as a query clause.
    Query(Item<Formula>, Clause),
    Data(Item<Atom>),
    Clause(Item<Clause>),
}

impl Entry {
    fn section(&self) -> Section {
        match self {
            Entry::Theory(_) => Section::Theory,
            Entry::Query(..) => Section::Query,
            Entry::Data(_) => Section::Data,
            Entry::Clause(_) => Section::Clauses,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub sig: Signature,
    /// Items in source order.
    pub entries: Vec<Entry>,
}

impl Problem {
    pub fn theory(&self) -> impl Iterator<Item = &Item<Formula>> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Theory(i) => Some(i),
            _ => None,
        })
    }

    pub fn queries(&self) -> impl Iterator<Item = (&Item<Formula>, &Clause)> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Query(i, c) => Some((i, c)),
            _ => None,
        })
    }

    pub fn data(&self) -> impl Iterator<Item = &Atom> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Data(i) => Some(&i.value),
            _ => None,
        })
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Clause(i) => Some(&i.value),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    True,
    False,
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eof,
}

fn show_tok(t: &Tok) -> String {
    match t {
        Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
        Tok::True => "`$true`".into(),
        Tok::False => "`$false`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Not => "`~`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Implies => "`->`".into(),
        Tok::Iff => "`<->`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let adv = |i: &mut usize, col: &mut usize, n: usize| {
        *i += n;
        *col += n;
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            adv(&mut i, &mut col, 1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 6)].iter().collect();
        let fixed = [
            ("<->", Tok::Iff),
            ("->", Tok::Implies),
            ("$true", Tok::True),
            ("$false", Tok::False),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            (",", Tok::Comma),
            (".", Tok::Dot),
            ("~", Tok::Not),
            ("&", Tok::And),
            ("|", Tok::Or),
        ];
        if let Some((s, t)) = fixed.iter().find(|(s, _)| rest.starts_with(s)) {
            out.push((t.clone(), pos));
            adv(&mut i, &mut col, s.chars().count());
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            if c.is_ascii_uppercase() || c == '_' {
                out.push((Tok::Upper(word), pos));
            } else {
                out.push((Tok::Lower(word), pos));
            }
            continue;
        }
        return Err(ParseError {
            pos,
            kind: ErrorKind::Syntax(format!("unexpected character `{c}`")),
        });
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    sig: &'a mut Signature,
    vars: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            kind: ErrorKind::Syntax(msg.into()),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", show_tok(&t), show_tok(self.peek())))
        }
    }

    fn var(&mut self, name: &str) -> Var {
        match self.vars.iter().position(|n| n == name) {
            Some(i) => Var(i as u32),
            None => {
                self.vars.push(name.to_string());
                Var(self.vars.len() as u32 - 1)
            }
        }
    }

    fn symbol(&mut self, name: &str, kind: SymbolKind, arity: usize, pos: Pos) -> Result<crate::term::Sym, ParseError> {
        self.sig.intern(name, kind, arity).map_err(|e| ParseError {
            pos,
            kind: ErrorKind::Symbol(e.to_string()),
        })
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let g = self.implication()?;
            f = Formula::Iff(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let a = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let b = self.implication()?;
            return Ok(Formula::Implies(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut fs = vec![self.conjunction()?];
        while *self.peek() == Tok::Or {
            self.bump();
            fs.push(self.conjunction()?);
        }
        Ok(if fs.len() == 1 { fs.pop().expect("one") } else { Formula::Or(fs) })
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut fs = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            fs.push(self.unary()?);
        }
        Ok(if fs.len() == 1 { fs.pop().expect("one") } else { Formula::And(fs) })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Lower(w) if w == "forall" || w == "exists" => {
                self.bump();
                let mut vs = Vec::new();
                loop {
                    match self.bump() {
                        (Tok::Upper(n), _) => vs.push(self.var(&n)),
                        (t, p) => {
                            return Err(ParseError {
                                pos: p,
                                kind: ErrorKind::Syntax(format!("expected a variable, found {}", show_tok(&t))),
                            })
                        }
                    }
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::Dot)?;
                let body = Box::new(self.formula()?);
                Ok(if w == "forall" {
                    Formula::Forall(vs, body)
                } else {
                    Formula::Exists(vs, body)
                })
            }
            Tok::Lower(_) => Ok(Formula::Atom(self.atom()?)),
            t => self.err(format!("expected a formula, found {}", show_tok(&t))),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let (t, pos) = self.bump();
        let Tok::Lower(name) = t else {
            return Err(ParseError {
                pos,
                kind: ErrorKind::Syntax(format!("expected a predicate, found {}", show_tok(&t))),
            });
        };
        let args = self.arguments()?;
        let p = self.symbol(&name, SymbolKind::Predicate, args.len(), pos)?;
        Ok(Atom::new(p, args))
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            (Tok::Upper(n), _) => Ok(Term::Var(self.var(&n))),
            (Tok::Lower(n), pos) => {
                let args = self.arguments()?;
                if args.is_empty() {
                    Ok(Term::Const(self.symbol(&n, SymbolKind::Constant, 0, pos)?))
                } else {
                    let f = self.symbol(&n, SymbolKind::Function, args.len(), pos)?;
                    Ok(Term::App(f, args))
                }
            }
            (t, pos) => Err(ParseError {
                pos,
                kind: ErrorKind::Syntax(format!("expected a term, found {}", show_tok(&t))),
            }),
        }
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        if *self.peek() == Tok::False {
            self.bump();
            return Ok(Clause::empty());
        }
        let mut lits = Vec::new();
        loop {
            let positive = if *self.peek() == Tok::Not {
                self.bump();
                false
            } else {
                true
            };
            let atom = self.atom()?;
            lits.push(Literal { positive, atom });
            if *self.peek() == Tok::Or {
                self.bump();
            } else {
                break;
            }
        }
        Ok(Clause::new(lits))
    }
}

/// Parses a problem file. Symbols are interned into `Problem::sig` in
/// order of first occurrence.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut sig = Signature::new();
    let entries = parse_into(&mut sig, text)?;
    Ok(Problem { sig, entries })
}

/// Like [`parse_problem`] but interns into an existing signature.
pub fn parse_into(sig: &mut Signature, text: &str) -> Result<Vec<Entry>, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        sig,
        vars: Vec::new(),
    };
    let mut section: Option<Section> = None;
    let mut entries = Vec::new();
    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        if let (Tok::Lower(w), Tok::Dot) = (p.peek().clone(), p.peek2().clone()) {
            if let Some(s) = Section::from_keyword(&w) {
                p.bump();
                p.bump();
                section = Some(s);
                continue;
            }
            if section.is_none() {
                return Err(ParseError {
                    pos,
                    kind: ErrorKind::UnknownDirective(w),
                });
            }
        }
        let Some(s) = section else {
            return p.err("expected a section header (`theory.`, `query.`, `data.` or `clauses.`)");
        };
        p.vars.clear();
        let entry = match s {
            Section::Theory => Entry::Theory(Item {
                value: p.formula()?,
                var_names: p.vars.clone(),
                pos,
            }),
            Section::Query => {
                let f = p.formula()?;
                let c = negate_bcq(&f).map_err(|e| ParseError {
                    pos,
                    kind: ErrorKind::NotQuery(e.to_string()),
                })?;
                Entry::Query(
                    Item {
                        value: f,
                        var_names: p.vars.clone(),
                        pos,
                    },
                    c,
                )
            }
            Section::Data => {
                let a = p.atom()?;
                if !a.is_ground() {
                    return Err(ParseError {
                        pos,
                        kind: ErrorKind::NotGround,
                    });
                }
                Entry::Data(Item {
                    value: a,
                    var_names: Vec::new(),
                    pos,
                })
            }
            Section::Clauses => Entry::Clause(Item {
                value: p.clause()?,
                var_names: p.vars.clone(),
                pos,
            }),
        };
        p.expect(Tok::Dot)?;
        entries.push(entry);
    }
    Ok(entries)
}

/// Symbol names of a precedence file, greatest first. Names may be
/// separated by whitespace, commas or `>`.
pub fn parse_precedence(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('%').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ',' || c == '>'))
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn named<'a>(names: &'a [String]) -> impl Fn(Var) -> String + 'a {
    move |v| names.get(v.0 as usize).cloned().unwrap_or_else(|| format!("X{}", v.0))
}

/// Prints a problem in the input grammar, one item per line.
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    let mut current: Option<Section> = None;
    for e in &p.entries {
        let s = e.section();
        if current != Some(s) {
            out.push_str(s.keyword());
            out.push_str(".\n");
            current = Some(s);
        }
        let line = match e {
            Entry::Theory(i) | Entry::Query(i, _) => {
                let vn = named(&i.var_names);
                FormulaPrinter { sig: &p.sig, var_name: &vn }.show(&i.value)
            }
            Entry::Data(i) => {
                let vn = named(&i.var_names);
                FormulaPrinter { sig: &p.sig, var_name: &vn }.show_atom(&i.value)
            }
            Entry::Clause(i) => show_clause_named(&p.sig, &i.value, &i.var_names),
        };
        out.push_str(&line);
        out.push_str(".\n");
    }
    out
}

/// A clause in the input grammar with the given variable names.
pub fn show_clause_named(sig: &Signature, c: &Clause, names: &[String]) -> String {
    if c.is_empty() {
        return "$false".to_string();
    }
    let vn = named(names);
    let pr = FormulaPrinter { sig, var_name: &vn };
    c.literals
        .iter()
        .map(|l| {
            let a = pr.show_atom(&l.atom);
            if l.positive {
                a
            } else {
                format!("~{a}")
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}
