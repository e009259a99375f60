//! Substitutions, unification and one-way matching.

use std::collections::BTreeMap;

use crate::term::{Atom, Clause, Literal, Term, Var};

/// Idempotent substitution: no bound variable occurs in any range term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Var, Term>,
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.map.get(&v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    /// Inserts a binding without resolving. Callers keep idempotence.
    pub fn bind(&mut self, v: Var, t: Term) {
        self.map.insert(v, t);
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        t.map_vars(&mut |v| self.map.get(&v).cloned().unwrap_or(Term::Var(v)))
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom {
            pred: a.pred,
            args: a.args.iter().map(|t| self.apply(t)).collect(),
        }
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        Literal {
            positive: l.positive,
            atom: self.apply_atom(&l.atom),
        }
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        Clause {
            literals: c.literals.iter().map(|l| self.apply_literal(l)).collect(),
            id: c.id,
            provenance: c.provenance.clone(),
        }
    }

    /// Image of a variable; the variable itself when unbound.
    pub fn image(&self, v: Var) -> Term {
        self.map.get(&v).cloned().unwrap_or(Term::Var(v))
    }

    /// Restricts the domain to `vars`.
    pub fn restrict(&self, vars: impl IntoIterator<Item = Var>) -> Subst {
        let mut out = Subst::new();
        for v in vars {
            if let Some(t) = self.map.get(&v) {
                out.map.insert(v, t.clone());
            }
        }
        out
    }
}

/// Unification state with triangular bindings. `finish` yields an
/// idempotent [`Subst`].
#[derive(Clone, Debug, Default)]
pub struct Unifier {
    bindings: BTreeMap<Var, Term>,
}

impl Unifier {
    pub fn new() -> Self {
        Self::default()
    }

    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(b) => t = b,
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => *w == v,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    /// Extends the state so that `a` and `b` become equal. On failure the
    /// state may be partially extended; clone first if that matters.
    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if self.occurs(*x, t) {
                    return false;
                }
                self.bindings.insert(*x, t.clone());
                true
            }
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    pub fn unify_atoms(&mut self, a: &Atom, b: &Atom) -> bool {
        a.pred == b.pred
            && a.args.len() == b.args.len()
            && a.args.iter().zip(&b.args).all(|(x, y)| self.unify(x, y))
    }

    fn resolve(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Var(v) => Term::Var(*v),
            Term::Const(c) => Term::Const(*c),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    pub fn finish(&self) -> Subst {
        let mut map = BTreeMap::new();
        for v in self.bindings.keys() {
            map.insert(*v, self.resolve(&Term::Var(*v)));
        }
        Subst { map }
    }
}

/// Most general simultaneous unifier of the pairs.
pub fn mgu(pairs: &[(Term, Term)]) -> Option<Subst> {
    let mut u = Unifier::new();
    for (a, b) in pairs {
        if !u.unify(a, b) {
            return None;
        }
    }
    Some(u.finish())
}

/// Most general simultaneous unifier of atom pairs.
pub fn mgu_atoms<'a>(pairs: impl IntoIterator<Item = (&'a Atom, &'a Atom)>) -> Option<Subst> {
    let mut u = Unifier::new();
    for (a, b) in pairs {
        if !u.unify_atoms(a, b) {
            return None;
        }
    }
    Some(u.finish())
}

/// One-way matching: extends `s` so that `s(pattern) == target`. Variables
/// of `target` are treated as constants.
pub fn match_term(pattern: &Term, target: &Term, s: &mut Subst) -> bool {
    match pattern {
        Term::Var(v) => match s.map.get(v) {
            Some(t) => t == target,
            None => {
                s.map.insert(*v, target.clone());
                true
            }
        },
        Term::Const(c) => matches!(target, Term::Const(d) if c == d),
        Term::App(f, xs) => match target {
            Term::App(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s))
            }
            _ => false,
        },
    }
}

pub fn match_literal(pattern: &Literal, target: &Literal, s: &mut Subst) -> bool {
    pattern.positive == target.positive
        && pattern.atom.pred == target.atom.pred
        && pattern.atom.args.len() == target.atom.args.len()
        && pattern
            .atom
            .args
            .iter()
            .zip(&target.atom.args)
            .all(|(x, y)| match_term(x, y, s))
}

/// Renames `c` apart from every variable below `offset` and returns the
/// renamed clause together with the next free variable id.
pub fn rename_apart(c: &Clause, offset: u32) -> (Clause, u32) {
    let n = c.normalized();
    let next = n.max_var().map_or(offset, |m| offset + m + 1);
    (n.shifted(offset), next)
}

fn literal_key(l: &Literal) -> (bool, crate::term::Sym, usize) {
    (l.positive, l.atom.pred, l.atom.args.len())
}

/// `c` and `d` are equal up to a bijective variable renaming, as multisets.
pub fn is_variant(c: &Clause, d: &Clause) -> bool {
    if c.len() != d.len() || c.vars().len() != d.vars().len() {
        return false;
    }
    let mut kc: Vec<_> = c.literals.iter().map(literal_key).collect();
    let mut kd: Vec<_> = d.literals.iter().map(literal_key).collect();
    kc.sort();
    kd.sort();
    if kc != kd {
        return false;
    }
    variant_renaming(c, d).is_some()
}

/// The bijective renaming `s` with `s(c) == d` as multisets, if any.
pub fn variant_renaming(c: &Clause, d: &Clause) -> Option<Subst> {
    if c.len() != d.len() || c.vars().len() != d.vars().len() {
        return None;
    }
    let mut used = vec![false; d.len()];
    variant_search(&c.literals, &d.literals, 0, &mut used, &Subst::new())
}

fn is_renaming(s: &Subst) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    s.map
        .values()
        .all(|t| matches!(t, Term::Var(v) if seen.insert(*v)))
}

fn variant_search(c: &[Literal], d: &[Literal], i: usize, used: &mut [bool], s: &Subst) -> Option<Subst> {
    if i == c.len() {
        return is_renaming(s).then(|| s.clone());
    }
    for j in 0..d.len() {
        if used[j] {
            continue;
        }
        let mut s2 = s.clone();
        if match_literal(&c[i], &d[j], &mut s2) && is_renaming(&s2) {
            used[j] = true;
            if let Some(r) = variant_search(c, d, i + 1, used, &s2) {
                return Some(r);
            }
            used[j] = false;
        }
    }
    None
}

/// Multiset subsumption: some substitution maps the literals of `c`
/// injectively onto literals of `d`. `c` and `d` must not share variables
/// unless sharing is intended; matching treats `d`'s variables as constants.
pub fn subsumes(c: &Clause, d: &Clause) -> bool {
    if c.len() > d.len() {
        return false;
    }
    // Cheap prefilter: every literal of c needs a candidate in d.
    for l in &c.literals {
        if !d.literals.iter().any(|m| literal_key(l) == literal_key(m)) {
            return false;
        }
    }
    let mut used = vec![false; d.len()];
    subsume_search(&c.literals, &d.literals, 0, &mut used, &Subst::new())
}

fn subsume_search(c: &[Literal], d: &[Literal], i: usize, used: &mut [bool], s: &Subst) -> bool {
    if i == c.len() {
        return true;
    }
    for j in 0..d.len() {
        if used[j] {
            continue;
        }
        let mut s2 = s.clone();
        if match_literal(&c[i], &d[j], &mut s2) {
            used[j] = true;
            if subsume_search(c, d, i + 1, used, &s2) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

/// Non-injective matching of all literals of `c` into the literal set of
/// `d`. Returns the witnessing substitution.
pub fn match_into(c: &[Literal], d: &[Literal]) -> Option<Subst> {
    fn go(c: &[Literal], d: &[Literal], i: usize, s: &Subst) -> Option<Subst> {
        if i == c.len() {
            return Some(s.clone());
        }
        for m in d {
            let mut s2 = s.clone();
            if match_literal(&c[i], m, &mut s2) {
                if let Some(r) = go(c, d, i + 1, &s2) {
                    return Some(r);
                }
            }
        }
        None
    }
    go(c, d, 0, &Subst::new())
}
