//! Internal/external formulas over System T terms.
//!
//! Sequence-bounded quantifiers `(∀w ∈ s)φ` and `(∃w ∈ s)φ` are not separate
//! nodes: they are `∀w (w ∈ s → φ)` and `∃w (w ∈ s ∧ φ)`, and the printer
//! and parser recognise those shapes.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::fresh::NameSupply;
use crate::library;
use crate::term::{type_check, Term, TypeError, TypingContext, Var};
use crate::types::FiniteType;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    /// Primitive equality at type 0.
    AtomEq0(Term, Term),
    /// `st_σ(t)`.
    St(FiniteType, Term),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
    ForallSt(Var, Box<Formula>),
    ExistsSt(Var, Box<Formula>),
    /// `(∀n ≤ t)φ`, a bounded number quantifier.
    BForall(Var, Term, Box<Formula>),
    BExists(Var, Term, Box<Formula>),
    /// `x ∈ s` for `s : σ*`.
    MemSeq(Term, Term),
}

/// An ordered tuple of typed variables with pairwise distinct names.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct BinderTuple(Vec<Var>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("formula is not internal: {0}")]
    NotInternal(String),
    #[error("duplicate name `{0}` in binder tuple")]
    DuplicateBinder(String),
}

impl BinderTuple {
    pub fn new(vars: Vec<Var>) -> Result<Self, FormulaError> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(FormulaError::DuplicateBinder(v.name.clone()));
            }
        }
        Ok(BinderTuple(vars))
    }

    pub fn empty() -> Self {
        BinderTuple(Vec::new())
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|v| v.name.as_str())
    }

    pub fn types(&self) -> Vec<FiniteType> {
        self.0.iter().map(|v| v.ty.clone()).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|v| v.name == name)
    }

    pub fn terms(&self) -> Vec<Term> {
        self.0.iter().map(Var::term).collect()
    }

    pub fn into_vars(self) -> Vec<Var> {
        self.0
    }
}

impl fmt::Display for BinderTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", v.name, v.ty)?;
        }
        Ok(())
    }
}

// Constructors -------------------------------------------------------------

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::AtomEq0(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::AtomEq0(a, b))
    }

    /// `a ≤ b`, encoded as `minus a b = 0`.
    pub fn le(a: Term, b: Term) -> Formula {
        Formula::AtomEq0(Term::apps(library::term("minus"), [a, b]), Term::Zero)
    }

    /// `0 = 0`.
    pub fn top() -> Formula {
        Formula::AtomEq0(Term::Zero, Term::Zero)
    }

    pub fn bottom() -> Formula {
        Formula::not(Formula::top())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(x: Var, f: Formula) -> Formula {
        Formula::Forall(x, Box::new(f))
    }

    pub fn exists(x: Var, f: Formula) -> Formula {
        Formula::Exists(x, Box::new(f))
    }

    pub fn forall_st(x: Var, f: Formula) -> Formula {
        Formula::ForallSt(x, Box::new(f))
    }

    pub fn exists_st(x: Var, f: Formula) -> Formula {
        Formula::ExistsSt(x, Box::new(f))
    }

    pub fn bforall(n: Var, bound: Term, f: Formula) -> Formula {
        Formula::BForall(n, bound, Box::new(f))
    }

    pub fn bexists(n: Var, bound: Term, f: Formula) -> Formula {
        Formula::BExists(n, bound, Box::new(f))
    }

    pub fn mem(x: Term, s: Term) -> Formula {
        Formula::MemSeq(x, s)
    }

    /// `(∀w ∈ s)φ`.
    pub fn forall_in(w: Var, s: Term, f: Formula) -> Formula {
        let m = Formula::mem(w.term(), s);
        Formula::forall(w, Formula::implies(m, f))
    }

    /// `(∃w ∈ s)φ`.
    pub fn exists_in(w: Var, s: Term, f: Formula) -> Formula {
        let m = Formula::mem(w.term(), s);
        Formula::exists(w, Formula::and(m, f))
    }

    pub fn forall_all(xs: &[Var], f: Formula) -> Formula {
        xs.iter()
            .rev()
            .fold(f, |acc, x| Formula::forall(x.clone(), acc))
    }

    pub fn exists_all(xs: &[Var], f: Formula) -> Formula {
        xs.iter()
            .rev()
            .fold(f, |acc, x| Formula::exists(x.clone(), acc))
    }

    pub fn forall_st_all(xs: &[Var], f: Formula) -> Formula {
        xs.iter()
            .rev()
            .fold(f, |acc, x| Formula::forall_st(x.clone(), acc))
    }

    pub fn exists_st_all(xs: &[Var], f: Formula) -> Formula {
        xs.iter()
            .rev()
            .fold(f, |acc, x| Formula::exists_st(x.clone(), acc))
    }

    /// Conjunction of a non-empty list, right-nested; `⊤` for an empty one.
    pub fn conj(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::top(),
            _ => {
                let last = fs.pop().unwrap();
                fs.into_iter()
                    .rev()
                    .fold(last, |acc, f| Formula::and(f, acc))
            }
        }
    }

    /// Left-nested conjunction `((a ∧ b) ∧ c)`, the shape the parser builds.
    pub fn conj_left(fs: Vec<Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => Formula::top(),
            Some(first) => it.fold(first, Formula::and),
        }
    }
}

// Views --------------------------------------------------------------------

impl Formula {
    /// Matches `(∀w ∈ s)φ`.
    pub fn as_forall_in(&self) -> Option<(&Var, &Term, &Formula)> {
        if let Formula::Forall(w, body) = self {
            if let Formula::Implies(m, f) = &**body {
                if let Formula::MemSeq(Term::Var(v), s) = &**m {
                    if v == w && !s.mentions(&w.name) {
                        return Some((w, s, f));
                    }
                }
            }
        }
        None
    }

    /// Matches `(∃w ∈ s)φ`.
    pub fn as_exists_in(&self) -> Option<(&Var, &Term, &Formula)> {
        if let Formula::Exists(w, body) = self {
            if let Formula::And(m, f) = &**body {
                if let Formula::MemSeq(Term::Var(v), s) = &**m {
                    if v == w && !s.mentions(&w.name) {
                        return Some((w, s, f));
                    }
                }
            }
        }
        None
    }

    /// Matches `a ≤ b` in its `minus a b = 0` encoding.
    pub fn as_le(&self) -> Option<(&Term, &Term)> {
        let Formula::AtomEq0(Term::App(f, b), Term::Zero) = self else {
            return None;
        };
        match &**f {
            Term::App(m, a) if matches!(&**m, Term::Const(c) if c.name == "minus") => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::AtomEq0(Term::Zero, Term::Zero))
    }

    /// Binder of a quantifier node, if any.
    pub fn binder(&self) -> Option<&Var> {
        match self {
            Formula::Forall(x, _)
            | Formula::Exists(x, _)
            | Formula::ForallSt(x, _)
            | Formula::ExistsSt(x, _)
            | Formula::BForall(x, _, _)
            | Formula::BExists(x, _, _) => Some(x),
            _ => None,
        }
    }

    /// Direct subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::AtomEq0(..) | Formula::St(..) | Formula::MemSeq(..) => vec![],
            Formula::Not(a)
            | Formula::Forall(_, a)
            | Formula::Exists(_, a)
            | Formula::ForallSt(_, a)
            | Formula::ExistsSt(_, a)
            | Formula::BForall(_, _, a)
            | Formula::BExists(_, _, a) => vec![a],
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => vec![a, b],
        }
    }

    /// Rebuilds the node with new children (same arity as [`Formula::children`]).
    pub fn with_children(&self, mut kids: Vec<Formula>) -> Formula {
        let mut next = || Box::new(kids.remove(0));
        match self {
            Formula::AtomEq0(..) | Formula::St(..) | Formula::MemSeq(..) => self.clone(),
            Formula::Not(_) => Formula::Not(next()),
            Formula::Forall(x, _) => Formula::Forall(x.clone(), next()),
            Formula::Exists(x, _) => Formula::Exists(x.clone(), next()),
            Formula::ForallSt(x, _) => Formula::ForallSt(x.clone(), next()),
            Formula::ExistsSt(x, _) => Formula::ExistsSt(x.clone(), next()),
            Formula::BForall(x, t, _) => Formula::BForall(x.clone(), t.clone(), next()),
            Formula::BExists(x, t, _) => Formula::BExists(x.clone(), t.clone(), next()),
            Formula::Or(..) => {
                let a = next();
                Formula::Or(a, next())
            }
            Formula::And(..) => {
                let a = next();
                Formula::And(a, next())
            }
            Formula::Implies(..) => {
                let a = next();
                Formula::Implies(a, next())
            }
        }
    }

    /// Terms occurring directly in this node (not in subformulas).
    pub fn node_terms(&self) -> Vec<&Term> {
        match self {
            Formula::AtomEq0(a, b) | Formula::MemSeq(a, b) => vec![a, b],
            Formula::St(_, t) | Formula::BForall(_, t, _) | Formula::BExists(_, t, _) => vec![t],
            _ => vec![],
        }
    }
}

// Variables ----------------------------------------------------------------

impl Formula {
    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<Var>) {
        for t in self.node_terms() {
            t.collect_free(bound, out);
        }
        match self.binder() {
            Some(x) => {
                bound.push(x.name.clone());
                for c in self.children() {
                    c.collect_free(bound, out);
                }
                bound.pop();
            }
            None => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.free_vars().iter().any(|v| v.name == name)
    }

    /// Every variable name in the formula, bound or free.
    pub fn all_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        for t in self.node_terms() {
            t.all_names(out);
        }
        if let Some(x) = self.binder() {
            out.push(x.name.clone());
        }
        for c in self.children() {
            c.collect_names(out);
        }
    }

    /// Capture-avoiding substitution `self[x := r]`.
    pub fn substitute(&self, x: &Var, r: &Term, names: &mut NameSupply) -> Formula {
        match self {
            Formula::AtomEq0(a, b) => {
                Formula::AtomEq0(a.substitute(x, r, names), b.substitute(x, r, names))
            }
            Formula::MemSeq(a, b) => {
                Formula::MemSeq(a.substitute(x, r, names), b.substitute(x, r, names))
            }
            Formula::St(ty, t) => Formula::St(ty.clone(), t.substitute(x, r, names)),
            Formula::Not(a) => Formula::not(a.substitute(x, r, names)),
            Formula::Or(a, b) => Formula::or(a.substitute(x, r, names), b.substitute(x, r, names)),
            Formula::And(a, b) => {
                Formula::and(a.substitute(x, r, names), b.substitute(x, r, names))
            }
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(x, r, names), b.substitute(x, r, names))
            }
            Formula::Forall(y, a)
            | Formula::Exists(y, a)
            | Formula::ForallSt(y, a)
            | Formula::ExistsSt(y, a)
            | Formula::BForall(y, _, a)
            | Formula::BExists(y, _, a) => {
                let bound = match self {
                    Formula::BForall(_, t, _) | Formula::BExists(_, t, _) => {
                        Some(t.substitute(x, r, names))
                    }
                    _ => None,
                };
                let (y2, body) = if y.name == x.name {
                    (y.clone(), (**a).clone())
                } else if r.mentions(&y.name) && a.mentions(&x.name) {
                    let z = Var::new(names.fresh(&y.name), y.ty.clone());
                    let renamed = a.substitute(y, &z.term(), names);
                    (z, renamed.substitute(x, r, names))
                } else {
                    (y.clone(), a.substitute(x, r, names))
                };
                let body = Box::new(body);
                match self {
                    Formula::Forall(..) => Formula::Forall(y2, body),
                    Formula::Exists(..) => Formula::Exists(y2, body),
                    Formula::ForallSt(..) => Formula::ForallSt(y2, body),
                    Formula::ExistsSt(..) => Formula::ExistsSt(y2, body),
                    Formula::BForall(..) => Formula::BForall(y2, bound.unwrap(), body),
                    _ => Formula::BExists(y2, bound.unwrap(), body),
                }
            }
        }
    }

    /// Simultaneous renaming of free variables to variables, used to rename
    /// tuple components. Applied one at a time through fresh intermediates so
    /// swaps are safe.
    pub fn rename_free(&self, pairs: &[(Var, Var)], names: &mut NameSupply) -> Formula {
        let mut f = self.clone();
        let mut tmp = Vec::new();
        for (from, to) in pairs {
            if from.name == to.name {
                continue;
            }
            let mid = Var::new(names.fresh(&from.name), from.ty.clone());
            f = f.substitute(from, &mid.term(), names);
            tmp.push((mid, to.clone()));
        }
        for (mid, to) in tmp {
            f = f.substitute(&mid, &to.term(), names);
        }
        f
    }
}

// Queries and transformations ------------------------------------------------

/// Identical up to consistent renaming of bound variables.
pub fn alpha_equal(f: &Formula, g: &Formula) -> bool {
    alpha_in(f, g, &mut Vec::new())
}

fn alpha_in(f: &Formula, g: &Formula, env: &mut Vec<(String, String)>) -> bool {
    use Formula::*;
    match (f, g) {
        (AtomEq0(a1, b1), AtomEq0(a2, b2)) | (MemSeq(a1, b1), MemSeq(a2, b2)) => {
            a1.alpha_eq_in(a2, env) && b1.alpha_eq_in(b2, env)
        }
        (St(t1, a), St(t2, b)) => t1 == t2 && a.alpha_eq_in(b, env),
        (Not(a), Not(b)) => alpha_in(a, b, env),
        (Or(a1, b1), Or(a2, b2))
        | (And(a1, b1), And(a2, b2))
        | (Implies(a1, b1), Implies(a2, b2)) => alpha_in(a1, a2, env) && alpha_in(b1, b2, env),
        (Forall(x, a), Forall(y, b))
        | (Exists(x, a), Exists(y, b))
        | (ForallSt(x, a), ForallSt(y, b))
        | (ExistsSt(x, a), ExistsSt(y, b)) => binder_in(x, a, y, b, env),
        (BForall(x, t1, a), BForall(y, t2, b)) | (BExists(x, t1, a), BExists(y, t2, b)) => {
            t1.alpha_eq_in(t2, env) && binder_in(x, a, y, b, env)
        }
        _ => false,
    }
}

fn binder_in(x: &Var, a: &Formula, y: &Var, b: &Formula, env: &mut Vec<(String, String)>) -> bool {
    if x.ty != y.ty {
        return false;
    }
    env.push((x.name.clone(), y.name.clone()));
    let ok = alpha_in(a, b, env);
    env.pop();
    ok
}

/// No `st` predicate and no standard quantifier anywhere.
pub fn is_internal(f: &Formula) -> bool {
    match f {
        Formula::St(..) | Formula::ForallSt(..) | Formula::ExistsSt(..) => false,
        _ => f.children().into_iter().all(is_internal),
    }
}

/// `A^st`: every unbounded quantifier becomes standard; bounded number
/// quantifiers are untouched.
pub fn relativize_st(f: &Formula) -> Result<Formula, FormulaError> {
    if !is_internal(f) {
        return Err(FormulaError::NotInternal(f.to_string()));
    }
    Ok(relativize(f))
}

fn relativize(f: &Formula) -> Formula {
    let kids: Vec<Formula> = f.children().into_iter().map(relativize).collect();
    match f {
        Formula::Forall(x, _) => Formula::ForallSt(x.clone(), Box::new(kids[0].clone())),
        Formula::Exists(x, _) => Formula::ExistsSt(x.clone(), Box::new(kids[0].clone())),
        _ => f.with_children(kids),
    }
}

/// True when every unbounded quantifier is a standard one.
pub fn all_quantifiers_standard(f: &Formula) -> bool {
    match f {
        Formula::Forall(..) | Formula::Exists(..) => false,
        _ => f.children().into_iter().all(all_quantifiers_standard),
    }
}

pub fn has_unbounded_quantifier(f: &Formula) -> bool {
    match f {
        Formula::Forall(..)
        | Formula::Exists(..)
        | Formula::ForallSt(..)
        | Formula::ExistsSt(..) => true,
        _ => f.children().into_iter().any(has_unbounded_quantifier),
    }
}

/// Extensional equality `x =_τ y` (or `x ≈_τ y` when `approx` is set):
/// `(∀z₁…zₖ)(x z₁…zₖ =₀ y z₁…zₖ)` for `τ = τ₁ → … → τₖ → 0`. For a
/// sequence type the equality is read componentwise: equal length and
/// equal entries below it.
pub fn expand_equality(
    x: &Term,
    y: &Term,
    ty: &FiniteType,
    approx: bool,
    names: &mut NameSupply,
) -> Formula {
    let (args, res) = ty.uncurry();
    let zs: Vec<Var> = args
        .iter()
        .map(|t| Var::new(names.fresh("z"), t.clone()))
        .collect();
    let xa = Term::apps(x.clone(), zs.iter().map(Var::term));
    let ya = Term::apps(y.clone(), zs.iter().map(Var::term));
    let matrix = match &res {
        FiniteType::Nat => Formula::AtomEq0(xa, ya),
        FiniteType::Seq(elem) => {
            let i = Var::nat(names.fresh("i"));
            let same_len = Formula::AtomEq0(Term::len(xa.clone()), Term::len(ya.clone()));
            let entry = expand_equality(
                &Term::idx(xa, i.term()),
                &Term::idx(ya, i.term()),
                elem,
                approx,
                names,
            );
            Formula::and(same_len, quantify(&[i], entry, approx))
        }
        FiniteType::Arrow(..) => unreachable!("uncurry strips arrows"),
    };
    quantify(&zs, matrix, approx)
}

fn quantify(zs: &[Var], f: Formula, approx: bool) -> Formula {
    if approx {
        Formula::forall_st_all(zs, f)
    } else {
        Formula::forall_all(zs, f)
    }
}

/// Like [`expand_equality`] but checks the operand types first.
pub fn expand_equality_checked(
    x: &Term,
    y: &Term,
    ctx: &TypingContext,
    approx: bool,
    names: &mut NameSupply,
) -> Result<Formula, FormulaError> {
    let tx = type_check(x, ctx)?;
    let ty = type_check(y, ctx)?;
    if tx != ty {
        return Err(FormulaError::Type(TypeError::TypeMismatch {
            expected: tx.to_string(),
            found: ty,
            location: y.to_string(),
        }));
    }
    Ok(expand_equality(x, y, &tx, approx, names))
}

/// Unfolds `x ∈ s` into a bounded existential over the positions of `s`.
///
/// Literal sequences get a numeral bound (`false` for `⟨⟩`); otherwise the
/// bound is `len(s) ∸ 1` guarded by `i < len(s)` so the empty case stays false.
pub fn desugar_membership(
    x: &Term,
    s: &Term,
    ctx: &TypingContext,
    names: &mut NameSupply,
) -> Result<Formula, FormulaError> {
    let st = type_check(s, ctx)?;
    let elem = match &st {
        FiniteType::Seq(e) => (**e).clone(),
        other => {
            return Err(FormulaError::Type(TypeError::TypeMismatch {
                expected: "a sequence type".into(),
                found: other.clone(),
                location: s.to_string(),
            }))
        }
    };
    let xt = type_check(x, ctx)?;
    if xt != elem {
        return Err(FormulaError::Type(TypeError::TypeMismatch {
            expected: elem.to_string(),
            found: xt,
            location: x.to_string(),
        }));
    }
    let i = Var::nat(names.fresh("i"));
    let entry = expand_equality(&Term::idx(s.clone(), i.term()), x, &elem, false, names);
    if let Some(items) = s.as_seq_lit() {
        if items.is_empty() {
            return Ok(Formula::bottom());
        }
        return Ok(Formula::bexists(
            i,
            Term::num(items.len() as u64 - 1),
            entry,
        ));
    }
    let bound = Term::apps(library::term("minus"), [Term::len(s.clone()), Term::num(1)]);
    let guard = Formula::le(Term::succ(i.term()), Term::len(s.clone()));
    Ok(Formula::bexists(i, bound, Formula::and(guard, entry)))
}

impl Formula {
    /// Checks that every term is well typed and every `=` compares type-0
    /// terms. Free variables must be in `ctx`.
    pub fn type_check(&self, ctx: &TypingContext) -> Result<(), TypeError> {
        let mut ctx = ctx.clone();
        self.check_in(&mut ctx)
    }

    fn check_in(&self, ctx: &mut TypingContext) -> Result<(), TypeError> {
        let want = |t: &Term, ty: &FiniteType, ctx: &TypingContext| -> Result<(), TypeError> {
            let got = type_check(t, ctx)?;
            if got == *ty {
                Ok(())
            } else {
                Err(TypeError::TypeMismatch {
                    expected: ty.to_string(),
                    found: got,
                    location: t.to_string(),
                })
            }
        };
        match self {
            Formula::AtomEq0(a, b) => {
                want(a, &FiniteType::Nat, ctx)?;
                want(b, &FiniteType::Nat, ctx)
            }
            Formula::St(ty, t) => want(t, ty, ctx),
            Formula::MemSeq(x, s) => {
                let st = type_check(s, ctx)?;
                match st {
                    FiniteType::Seq(e) => want(x, &e, ctx),
                    other => Err(TypeError::TypeMismatch {
                        expected: "a sequence type".into(),
                        found: other,
                        location: s.to_string(),
                    }),
                }
            }
            Formula::BForall(n, t, body) | Formula::BExists(n, t, body) => {
                want(t, &FiniteType::Nat, ctx)?;
                if !n.ty.is_nat() {
                    return Err(TypeError::TypeMismatch {
                        expected: "0".into(),
                        found: n.ty.clone(),
                        location: n.name.clone(),
                    });
                }
                ctx.push(n.name.clone(), n.ty.clone());
                let r = body.check_in(ctx);
                ctx.pop();
                r
            }
            _ => match self.binder() {
                Some(x) => {
                    ctx.push(x.name.clone(), x.ty.clone());
                    let r = self.children()[0].check_in(ctx);
                    ctx.pop();
                    r
                }
                None => {
                    for c in self.children() {
                        c.check_in(ctx)?;
                    }
                    Ok(())
                }
            },
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::formula_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(name: &str) -> Var {
        Var::nat(name)
    }

    fn f1() -> Term {
        Term::var("f", FiniteType::one())
    }

    #[test]
    fn alpha_equal_basics() {
        let a = Formula::forall(n("x"), Formula::eq(n("x").term(), n("x").term()));
        let b = Formula::forall(n("y"), Formula::eq(n("y").term(), n("y").term()));
        let c = Formula::exists(n("x"), Formula::eq(n("x").term(), n("x").term()));
        assert!(alpha_equal(&a, &b));
        assert!(!alpha_equal(&a, &c));
        assert!(alpha_equal(&a, &a));
        // bound vs free must not be confused
        let d = Formula::forall(n("x"), Formula::eq(n("x").term(), n("y").term()));
        let e = Formula::forall(n("y"), Formula::eq(n("y").term(), n("y").term()));
        assert!(!alpha_equal(&d, &e));
    }

    #[test]
    fn substitution_examples() {
        let mut names = NameSupply::new();
        let fa = |t: Term| Formula::eq(Term::app(f1(), t), Term::Zero);
        let g = fa(n("n").term()).substitute(&n("n"), &Term::num(3), &mut names);
        assert_eq!(g, fa(Term::num(3)));

        let body = Formula::forall(n("n"), fa(n("n").term()));
        let gv = Var::new("g", FiniteType::one());
        let h = body.substitute(&Var::new("f", FiniteType::one()), &gv.term(), &mut names);
        let want = Formula::forall(
            n("n"),
            Formula::eq(Term::app(gv.term(), n("n").term()), Term::Zero),
        );
        assert_eq!(h, want);

        // (∀n. f n = m)[m := n]  ~>  ∀n'. f n' = n
        names.reserve(["n", "m", "f"]);
        let src = Formula::forall(
            n("n"),
            Formula::eq(Term::app(f1(), n("n").term()), n("m").term()),
        );
        let out = src.substitute(&n("m"), &n("n").term(), &mut names);
        match &out {
            Formula::Forall(b, body) => {
                assert_ne!(b.name, "n");
                assert_eq!(
                    **body,
                    Formula::eq(Term::app(f1(), b.term()), n("n").term())
                );
            }
            other => panic!("{other}"),
        }
        assert_eq!(
            out.free_vars()
                .iter()
                .map(|v| v.name.as_str())
                .collect::<Vec<_>>(),
            ["f", "n"]
        );
    }

    #[test]
    fn internal_and_relativized() {
        let atom = Formula::eq(Term::app(f1(), n("n").term()), Term::Zero);
        assert!(is_internal(&atom));
        assert!(!is_internal(&Formula::St(FiniteType::Nat, n("x").term())));
        assert!(!is_internal(&Formula::forall_st(n("n"), atom.clone())));

        let ex = Formula::exists(
            n("x"),
            Formula::eq(Term::app(f1(), n("x").term()), Term::Zero),
        );
        let rel = relativize_st(&ex).unwrap();
        assert_eq!(
            rel,
            Formula::exists_st(
                n("x"),
                Formula::eq(Term::app(f1(), n("x").term()), Term::Zero)
            )
        );
        let bounded = Formula::bexists(
            n("m"),
            n("i").term(),
            Formula::eq(Term::app(f1(), n("m").term()), Term::Zero),
        );
        assert_eq!(relativize_st(&bounded).unwrap(), bounded);
        assert_eq!(relativize_st(&atom).unwrap(), atom);
        assert!(relativize_st(&rel).is_err());
    }

    #[test]
    fn equality_expansion() {
        let mut names = NameSupply::new();
        let x = Term::var("x", FiniteType::one());
        let y = Term::var("y", FiniteType::one());
        let exact = expand_equality(&x, &y, &FiniteType::one(), false, &mut names);
        let z = n("z");
        let want = Formula::forall(
            z.clone(),
            Formula::eq(
                Term::app(x.clone(), z.term()),
                Term::app(y.clone(), z.term()),
            ),
        );
        assert!(alpha_equal(&exact, &want));
        let approx = expand_equality(&x, &y, &FiniteType::one(), true, &mut names);
        let want = Formula::forall_st(
            z.clone(),
            Formula::eq(Term::app(x, z.term()), Term::app(y, z.term())),
        );
        assert!(alpha_equal(&approx, &want));
        let base = expand_equality(
            &n("n").term(),
            &n("m").term(),
            &FiniteType::Nat,
            false,
            &mut names,
        );
        assert_eq!(base, Formula::eq(n("n").term(), n("m").term()));

        let ctx = TypingContext::new()
            .with("x", FiniteType::one())
            .with("n", FiniteType::Nat);
        assert!(expand_equality_checked(
            &Term::var("x", FiniteType::one()),
            &n("n").term(),
            &ctx,
            false,
            &mut names
        )
        .is_err());
    }

    #[test]
    fn membership_desugaring() {
        let mut names = NameSupply::new();
        let ctx = TypingContext::new().with("x", FiniteType::Nat);
        let empty = Term::SeqEmpty(FiniteType::Nat);
        assert_eq!(
            desugar_membership(&n("x").term(), &empty, &ctx, &mut names).unwrap(),
            Formula::bottom()
        );
        let single = Term::seq_lit(FiniteType::Nat, [Term::num(3)]);
        let got = desugar_membership(&n("x").term(), &single, &ctx, &mut names).unwrap();
        let want = Formula::bexists(
            n("i"),
            Term::Zero,
            Formula::eq(Term::idx(single.clone(), n("i").term()), n("x").term()),
        );
        assert!(alpha_equal(&got, &want), "{got}");

        // y ∈ F(x) with F : 0 → 0*
        let fty = FiniteType::arrow(FiniteType::Nat, FiniteType::seq(FiniteType::Nat));
        let ctx = ctx.with("F", fty.clone()).with("y", FiniteType::Nat);
        let fx = Term::app(Term::var("F", fty), n("x").term());
        let got = desugar_membership(&n("y").term(), &fx, &ctx, &mut names).unwrap();
        assert!(matches!(got, Formula::BExists(..)));
        assert!(is_internal(&got));
        assert!(got.type_check(&ctx).is_ok());

        let bad = desugar_membership(&fx, &fx, &ctx, &mut names);
        assert!(bad.is_err());
    }

    #[test]
    fn binder_tuples_reject_duplicates() {
        assert!(BinderTuple::new(vec![n("x"), n("y")]).is_ok());
        assert_eq!(
            BinderTuple::new(vec![n("x"), n("x")]),
            Err(FormulaError::DuplicateBinder("x".into()))
        );
    }
}
