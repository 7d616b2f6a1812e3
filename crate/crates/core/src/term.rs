//! System T terms with finite-sequence primitives, and their typechecker.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::fresh::NameSupply;
use crate::types::FiniteType;

/// A typed variable. Binders and occurrences both carry the type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct Var {
    pub name: String,
    pub ty: FiniteType,
}

impl Var {
    pub fn new(name: impl Into<String>, ty: FiniteType) -> Self {
        Var {
            name: name.into(),
            ty,
        }
    }

    pub fn nat(name: impl Into<String>) -> Self {
        Var::new(name, FiniteType::Nat)
    }

    pub fn term(&self) -> Term {
        Term::Var(self.clone())
    }
}

/// A named closed constant. Library constants (`add`, `maxseq`, …) have a
/// System T definition; declared constants (`bar`, `lh`, …) are opaque.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Const {
    pub name: String,
    pub ty: FiniteType,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(Var),
    Const(Const),
    Zero,
    Succ(Box<Term>),
    /// The recursor `R_ρ : ρ → (0 → ρ → ρ) → 0 → ρ`.
    Rec(FiniteType),
    Lam(Var, Box<Term>),
    App(Box<Term>, Box<Term>),
    SeqEmpty(FiniteType),
    SeqAppend(Box<Term>, Box<Term>),
    SeqLen(Box<Term>),
    SeqIdx(Box<Term>, Box<Term>),
    /// Numeral sugar for `n`-fold `Succ` of `Zero`.
    NumLit(u64),
}

impl Term {
    pub fn var(name: impl Into<String>, ty: FiniteType) -> Term {
        Term::Var(Var::new(name, ty))
    }

    pub fn num(n: u64) -> Term {
        if n == 0 {
            Term::Zero
        } else {
            Term::NumLit(n)
        }
    }

    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }

    pub fn lam(x: Var, body: Term) -> Term {
        Term::Lam(x, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn append(s: Term, x: Term) -> Term {
        Term::SeqAppend(Box::new(s), Box::new(x))
    }

    pub fn len(s: Term) -> Term {
        Term::SeqLen(Box::new(s))
    }

    pub fn idx(s: Term, i: Term) -> Term {
        Term::SeqIdx(Box::new(s), Box::new(i))
    }

    /// Literal sequence `⟨x₀,…,xₙ₋₁⟩`.
    pub fn seq_lit(elem: FiniteType, items: impl IntoIterator<Item = Term>) -> Term {
        items.into_iter().fold(Term::SeqEmpty(elem), Term::append)
    }

    /// If the term is a literal `<>[σ]` followed by appends, its items.
    pub fn as_seq_lit(&self) -> Option<Vec<&Term>> {
        match self {
            Term::SeqEmpty(_) => Some(Vec::new()),
            Term::SeqAppend(s, x) => {
                let mut items = s.as_seq_lit()?;
                items.push(x);
                Some(items)
            }
            _ => None,
        }
    }

    /// Head and spine of an application chain.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub(crate) fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(&v.name) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Lam(x, b) => {
                bound.push(x.name.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            _ => self.for_each_child(|c| c.collect_free(bound, out)),
        }
    }

    fn for_each_child(&self, mut f: impl FnMut(&Term)) {
        match self {
            Term::Var(_)
            | Term::Const(_)
            | Term::Zero
            | Term::Rec(_)
            | Term::SeqEmpty(_)
            | Term::NumLit(_) => {}
            Term::Succ(a) | Term::SeqLen(a) | Term::Lam(_, a) => f(a),
            Term::App(a, b) | Term::SeqAppend(a, b) | Term::SeqIdx(a, b) => {
                f(a);
                f(b)
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.free_vars().iter().any(|v| v.name == name)
    }

    /// Every variable name occurring in the term, bound or free.
    pub fn all_names(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => out.push(v.name.clone()),
            Term::Lam(x, b) => {
                out.push(x.name.clone());
                b.all_names(out)
            }
            _ => self.for_each_child(|c| c.all_names(out)),
        }
    }

    /// Capture-avoiding substitution `self[x := r]`.
    pub fn substitute(&self, x: &Var, r: &Term, names: &mut NameSupply) -> Term {
        match self {
            Term::Var(v) if v.name == x.name => r.clone(),
            Term::Var(_)
            | Term::Const(_)
            | Term::Zero
            | Term::Rec(_)
            | Term::SeqEmpty(_)
            | Term::NumLit(_) => self.clone(),
            Term::Lam(y, b) => {
                if y.name == x.name {
                    return self.clone();
                }
                if r.mentions(&y.name) && b.mentions(&x.name) {
                    let z = Var::new(names.fresh(&y.name), y.ty.clone());
                    let b2 = b.substitute(y, &z.term(), names);
                    Term::lam(z, b2.substitute(x, r, names))
                } else {
                    Term::lam(y.clone(), b.substitute(x, r, names))
                }
            }
            Term::Succ(a) => Term::succ(a.substitute(x, r, names)),
            Term::SeqLen(a) => Term::len(a.substitute(x, r, names)),
            Term::App(a, b) => Term::app(a.substitute(x, r, names), b.substitute(x, r, names)),
            Term::SeqAppend(a, b) => {
                Term::append(a.substitute(x, r, names), b.substitute(x, r, names))
            }
            Term::SeqIdx(a, b) => Term::idx(a.substitute(x, r, names), b.substitute(x, r, names)),
        }
    }

    /// Structural equality up to renaming of lambda binders. The maps pair
    /// bound names of `self` with bound names of `other`.
    pub(crate) fn alpha_eq_in(&self, other: &Term, left: &mut Vec<(String, String)>) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => {
                if a.ty != b.ty {
                    return false;
                }
                let la = left.iter().rposition(|(l, _)| *l == a.name);
                let rb = left.iter().rposition(|(_, r)| *r == b.name);
                match (la, rb) {
                    (None, None) => a.name == b.name,
                    (i, j) => i == j,
                }
            }
            (Term::Lam(x, a), Term::Lam(y, b)) => {
                if x.ty != y.ty {
                    return false;
                }
                left.push((x.name.clone(), y.name.clone()));
                let ok = a.alpha_eq_in(b, left);
                left.pop();
                ok
            }
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::Zero, Term::Zero) => true,
            (Term::NumLit(a), Term::NumLit(b)) => a == b,
            (Term::Rec(a), Term::Rec(b)) => a == b,
            (Term::SeqEmpty(a), Term::SeqEmpty(b)) => a == b,
            (Term::Succ(a), Term::Succ(b)) | (Term::SeqLen(a), Term::SeqLen(b)) => {
                a.alpha_eq_in(b, left)
            }
            (Term::App(a1, a2), Term::App(b1, b2))
            | (Term::SeqAppend(a1, a2), Term::SeqAppend(b1, b2))
            | (Term::SeqIdx(a1, a2), Term::SeqIdx(b1, b2)) => {
                a1.alpha_eq_in(b1, left) && a2.alpha_eq_in(b2, left)
            }
            _ => false,
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.alpha_eq_in(other, &mut Vec::new())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::term_to_string(self, false))
    }
}

/// Ordered variable typing; later entries shadow earlier ones.
#[derive(Clone, Debug, Default)]
pub struct TypingContext {
    entries: Vec<(String, FiniteType)>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, ty: FiniteType) {
        self.entries.push((name.into(), ty));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn with(mut self, name: impl Into<String>, ty: FiniteType) -> Self {
        self.push(name, ty);
        self
    }

    pub fn lookup(&self, name: &str) -> Option<&FiniteType> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn as_map(&self) -> HashMap<String, FiniteType> {
        self.entries.iter().cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type mismatch in {location}: expected {expected}, found {found}")]
    TypeMismatch {
        expected: String,
        found: FiniteType,
        location: String,
    },
}

fn mismatch(expected: impl fmt::Display, found: &FiniteType, location: &Term) -> TypeError {
    TypeError::TypeMismatch {
        expected: expected.to_string(),
        found: found.clone(),
        location: location.to_string(),
    }
}

/// The type of a recursor `R_ρ`.
pub fn rec_type(rho: &FiniteType) -> FiniteType {
    let step = FiniteType::arrow(FiniteType::Nat, FiniteType::arrow(rho.clone(), rho.clone()));
    FiniteType::curried([rho.clone(), step, FiniteType::Nat], rho.clone())
}

pub fn type_check(t: &Term, ctx: &TypingContext) -> Result<FiniteType, TypeError> {
    let mut ctx = ctx.clone();
    check(t, &mut ctx)
}

fn expect(t: &Term, want: &FiniteType, ctx: &mut TypingContext) -> Result<(), TypeError> {
    let got = check(t, ctx)?;
    if got == *want {
        Ok(())
    } else {
        Err(mismatch(want, &got, t))
    }
}

fn check(t: &Term, ctx: &mut TypingContext) -> Result<FiniteType, TypeError> {
    match t {
        Term::Var(v) => match ctx.lookup(&v.name) {
            None => Err(TypeError::UnboundVariable(v.name.clone())),
            Some(ty) if *ty == v.ty => Ok(v.ty.clone()),
            Some(ty) => Err(mismatch(ty, &v.ty, t)),
        },
        Term::Const(c) => Ok(c.ty.clone()),
        Term::Zero | Term::NumLit(_) => Ok(FiniteType::Nat),
        Term::Succ(a) => {
            expect(a, &FiniteType::Nat, ctx)?;
            Ok(FiniteType::Nat)
        }
        Term::Rec(rho) => Ok(rec_type(rho)),
        Term::Lam(x, body) => {
            ctx.push(x.name.clone(), x.ty.clone());
            let res = check(body, ctx);
            ctx.pop();
            Ok(FiniteType::arrow(x.ty.clone(), res?))
        }
        Term::App(f, a) => {
            let ft = check(f, ctx)?;
            match ft {
                FiniteType::Arrow(dom, cod) => {
                    expect(a, &dom, ctx)?;
                    Ok((*cod).clone())
                }
                other => Err(mismatch("a function type", &other, f)),
            }
        }
        Term::SeqEmpty(elem) => Ok(FiniteType::seq(elem.clone())),
        Term::SeqAppend(s, x) => {
            let st = check(s, ctx)?;
            match &st {
                FiniteType::Seq(elem) => {
                    expect(x, elem, ctx)?;
                    Ok(st.clone())
                }
                other => Err(mismatch("a sequence type", other, s)),
            }
        }
        Term::SeqLen(s) => match check(s, ctx)? {
            FiniteType::Seq(_) => Ok(FiniteType::Nat),
            other => Err(mismatch("a sequence type", &other, s)),
        },
        Term::SeqIdx(s, i) => {
            let st = check(s, ctx)?;
            expect(i, &FiniteType::Nat, ctx)?;
            match st {
                FiniteType::Seq(elem) => Ok((*elem).clone()),
                other => Err(mismatch("a sequence type", &other, s)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> FiniteType {
        FiniteType::Nat
    }

    #[test]
    fn identity_has_arrow_type() {
        let t = Term::lam(Var::nat("x"), Term::var("x", nat()));
        assert_eq!(
            type_check(&t, &TypingContext::new()).unwrap(),
            FiniteType::arrow(nat(), nat())
        );
    }

    #[test]
    fn length_of_empty_is_nat() {
        let t = Term::len(Term::SeqEmpty(nat()));
        assert_eq!(type_check(&t, &TypingContext::new()).unwrap(), nat());
    }

    #[test]
    fn successor_of_sequence_is_rejected() {
        let t = Term::succ(Term::SeqEmpty(nat()));
        match type_check(&t, &TypingContext::new()) {
            Err(TypeError::TypeMismatch {
                expected, found, ..
            }) => {
                assert_eq!(expected, "0");
                assert_eq!(found, FiniteType::seq(nat()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let t = Term::app(Term::var("f", FiniteType::one()), Term::Zero);
        assert_eq!(
            type_check(&t, &TypingContext::new()),
            Err(TypeError::UnboundVariable("f".into()))
        );
        let ctx = TypingContext::new().with("f", FiniteType::one());
        assert_eq!(type_check(&t, &ctx).unwrap(), nat());
    }

    #[test]
    fn recursor_and_indexing_types() {
        let rho = FiniteType::seq(nat());
        assert_eq!(
            type_check(&Term::Rec(rho.clone()), &TypingContext::new()).unwrap(),
            rec_type(&rho)
        );
        let s = Term::seq_lit(nat(), [Term::num(4), Term::num(7)]);
        let t = Term::idx(s, Term::num(1));
        assert_eq!(type_check(&t, &TypingContext::new()).unwrap(), nat());
        let bad = Term::idx(Term::num(3), Term::Zero);
        assert!(type_check(&bad, &TypingContext::new()).is_err());
    }

    #[test]
    fn shadowing_is_innermost_first() {
        let ctx = TypingContext::new()
            .with("x", FiniteType::one())
            .with("x", nat());
        assert_eq!(ctx.lookup("x"), Some(&nat()));
        let t = Term::lam(Var::nat("x"), Term::var("x", nat()));
        let ctx = TypingContext::new().with("x", FiniteType::one());
        assert!(type_check(&t, &ctx).is_ok());
    }

    #[test]
    fn substitution_avoids_capture() {
        let mut names = NameSupply::new();
        names.reserve(["x", "y"]);
        // (\y. x) [x := y]  ~>  \y1. y
        let t = Term::lam(Var::nat("y"), Term::var("x", nat()));
        let r = t.substitute(&Var::nat("x"), &Term::var("y", nat()), &mut names);
        match &r {
            Term::Lam(b, body) => {
                assert_ne!(b.name, "y");
                assert_eq!(**body, Term::var("y", nat()));
            }
            _ => panic!(),
        }
        assert!(r.alpha_eq(&Term::lam(Var::nat("z"), Term::var("y", nat()))));
        assert!(!r.alpha_eq(&Term::lam(Var::nat("y"), Term::var("y", nat()))));
    }
}
