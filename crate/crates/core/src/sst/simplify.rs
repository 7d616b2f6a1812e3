//! Equivalence-preserving cleanup of normal forms.
//!
//! One rewrite per pass. Rules are tried in a fixed order and matrix rules
//! fire at the innermost matching position first, so output is deterministic.

use crate::formula::Formula;
use crate::fresh::NameSupply;
use crate::term::{Term, Var};
use crate::types::FiniteType;

use super::{NormalForm, RewriteTrace, SstError};

pub const MAX_PASSES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// `(∀w ∈ ⟨z⟩)φ ↦ φ[w:=z]`, and dually for `∃`.
    SingletonMembership,
    /// `(∀x)Q̄(x ≠ t ∨ ψ) ↦ Q̄ψ[x:=t]` and `(∃x)Q̄(x = t ∧ ψ) ↦ Q̄ψ[x:=t]`.
    EqualityElimination,
    /// A tuple component not mentioned in the matrix.
    VacuousComponent,
    /// A matrix quantifier whose variable does not occur in its body.
    VacuousBinder,
    /// `(∃st W:σ*)…(∃w∈W)ψ(w)… ↦ (∃st w:σ)…ψ(w)…`.
    SequenceWitness,
    /// `(∀st W)(∃st x̲)…(∀w∈W[x̲])ψ(w)… ↦ (∀st w)…ψ(w)…`.
    ConstantFunctional,
    /// Double negation and negations that dualise all the way to a negation.
    NegationCancel,
}

const FULL: &[Rule] = &[
    Rule::SingletonMembership,
    Rule::EqualityElimination,
    Rule::VacuousComponent,
    Rule::VacuousBinder,
    Rule::SequenceWitness,
    Rule::ConstantFunctional,
    Rule::NegationCancel,
];

const MATRIX_ONLY: &[Rule] = &[
    Rule::SingletonMembership,
    Rule::EqualityElimination,
    Rule::VacuousBinder,
    Rule::NegationCancel,
];

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::SingletonMembership => "singleton-membership",
            Rule::EqualityElimination => "equality-elimination",
            Rule::VacuousComponent => "vacuous-component",
            Rule::VacuousBinder => "vacuous-binder",
            Rule::SequenceWitness => "sequence-witness",
            Rule::ConstantFunctional => "constant-functional",
            Rule::NegationCancel => "negation-cancel",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        FULL.iter().copied().find(|r| r.name() == name)
    }
}

/// Runs every rule to a fixed point with a private name supply.
pub fn simplify(nf: &NormalForm) -> Result<(NormalForm, RewriteTrace), SstError> {
    let mut names = NameSupply::new();
    names.reserve(nf.render().all_names());
    let mut trace = RewriteTrace::default();
    let out = simplify_with(nf, &mut names, &mut trace, false)?;
    Ok((out, trace))
}

/// Only the rules that act inside the matrix.
pub fn cleanup_matrix(
    nf: &NormalForm,
    names: &mut NameSupply,
    trace: &mut RewriteTrace,
) -> Result<NormalForm, SstError> {
    simplify_with(nf, names, trace, true)
}

pub fn simplify_with(
    nf: &NormalForm,
    names: &mut NameSupply,
    trace: &mut RewriteTrace,
    matrix_only: bool,
) -> Result<NormalForm, SstError> {
    let rules = if matrix_only { MATRIX_ONLY } else { FULL };
    let mut cur = nf.clone();
    for _ in 0..MAX_PASSES {
        let next = rules
            .iter()
            .find_map(|&r| apply_rule(r, &cur, names).map(|nf| (r, nf)));
        match next {
            None => return Ok(cur),
            Some((rule, nf)) => {
                trace.push(rule.name(), cur.render(), nf.render());
                cur = nf;
            }
        }
    }
    Err(SstError::Runaway(MAX_PASSES))
}

/// A single application of `rule`, if it applies anywhere.
pub fn apply_rule(rule: Rule, nf: &NormalForm, names: &mut NameSupply) -> Option<NormalForm> {
    let with_matrix =
        |m: Formula| NormalForm::raw(nf.univ.vars().to_vec(), nf.exist.vars().to_vec(), m);
    match rule {
        Rule::SingletonMembership => {
            rewrite_first(&nf.matrix, &mut |f| singleton(f, names)).map(with_matrix)
        }
        Rule::EqualityElimination => {
            rewrite_first(&nf.matrix, &mut |f| eliminate_equality(f, names)).map(with_matrix)
        }
        Rule::VacuousBinder => rewrite_first(&nf.matrix, &mut vacuous_binder).map(with_matrix),
        // A plain double negation goes first, so that an internal leaf
        // negated twice comes back unchanged instead of half dualised.
        Rule::NegationCancel => rewrite_first(&nf.matrix, &mut |f| match f {
            Formula::Not(a) => match &**a {
                Formula::Not(b) => Some((**b).clone()),
                _ => None,
            },
            _ => None,
        })
        .or_else(|| {
            rewrite_outermost(&nf.matrix, &mut |f| match f {
                Formula::Not(a) => cancel(a),
                _ => None,
            })
        })
        .map(with_matrix),
        Rule::VacuousComponent => vacuous_component(nf),
        Rule::SequenceWitness => sequence_witness(nf, names),
        Rule::ConstantFunctional => constant_functional(nf, names),
    }
}

// Rewrites at the innermost, leftmost position where `rule` fires.
fn rewrite_first(
    f: &Formula,
    rule: &mut dyn FnMut(&Formula) -> Option<Formula>,
) -> Option<Formula> {
    let kids = f.children();
    for (i, k) in kids.iter().enumerate() {
        if let Some(new) = rewrite_first(k, rule) {
            let mut all: Vec<Formula> = kids.iter().map(|c| (*c).clone()).collect();
            all[i] = new;
            return Some(f.with_children(all));
        }
    }
    rule(f)
}

// Rewrites at the outermost, leftmost position where `rule` fires.
fn rewrite_outermost(
    f: &Formula,
    rule: &mut dyn FnMut(&Formula) -> Option<Formula>,
) -> Option<Formula> {
    if let Some(new) = rule(f) {
        return Some(new);
    }
    let kids = f.children();
    for (i, k) in kids.iter().enumerate() {
        if let Some(new) = rewrite_outermost(k, rule) {
            let mut all: Vec<Formula> = kids.iter().map(|c| (*c).clone()).collect();
            all[i] = new;
            return Some(f.with_children(all));
        }
    }
    None
}

fn singleton(f: &Formula, names: &mut NameSupply) -> Option<Formula> {
    let (w, s, body) = f.as_forall_in().or_else(|| f.as_exists_in())?;
    let items = s.as_seq_lit()?;
    if items.len() != 1 {
        return None;
    }
    Some(body.substitute(w, items[0], names))
}

fn vacuous_binder(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Forall(x, b)
        | Formula::Exists(x, b)
        | Formula::BForall(x, _, b)
        | Formula::BExists(x, _, b)
            if !b.mentions(&x.name) =>
        {
            Some((**b).clone())
        }
        _ => None,
    }
}

/// Formula equivalent to `¬f` obtained by dualising, provided every branch
/// ends in a negation that cancels.
pub(crate) fn cancel(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Not(a) => Some((**a).clone()),
        Formula::Forall(x, b) => Some(Formula::exists(x.clone(), cancel(b)?)),
        Formula::Exists(x, b) => Some(Formula::forall(x.clone(), cancel(b)?)),
        Formula::BForall(x, t, b) => Some(Formula::bexists(x.clone(), t.clone(), cancel(b)?)),
        Formula::BExists(x, t, b) => Some(Formula::bforall(x.clone(), t.clone(), cancel(b)?)),
        Formula::Or(a, b) => Some(Formula::and(cancel(a)?, cancel(b)?)),
        Formula::Implies(a, b) => Some(Formula::and((**a).clone(), cancel(b)?)),
        Formula::And(a, b) => {
            let cb = cancel(b)?;
            match &**a {
                Formula::Not(ca) => Some(Formula::or((**ca).clone(), cb)),
                _ => Some(Formula::implies((**a).clone(), cb)),
            }
        }
        _ => None,
    }
}

/// Negation normal form: implications unfolded, negations pushed onto
/// atoms, double negations removed.
pub fn negation_normal_form(f: &Formula) -> Formula {
    nnf(f, true)
}

fn nnf(f: &Formula, positive: bool) -> Formula {
    let q = |x: &Var, b: &Formula, universal: bool| {
        if universal == positive {
            Formula::forall(x.clone(), nnf(b, positive))
        } else {
            Formula::exists(x.clone(), nnf(b, positive))
        }
    };
    match f {
        Formula::Not(a) => nnf(a, !positive),
        Formula::Forall(x, b) => q(x, b, true),
        Formula::Exists(x, b) => q(x, b, false),
        Formula::BForall(x, t, b) if positive => {
            Formula::bforall(x.clone(), t.clone(), nnf(b, true))
        }
        Formula::BForall(x, t, b) => Formula::bexists(x.clone(), t.clone(), nnf(b, false)),
        Formula::BExists(x, t, b) if positive => {
            Formula::bexists(x.clone(), t.clone(), nnf(b, true))
        }
        Formula::BExists(x, t, b) => Formula::bforall(x.clone(), t.clone(), nnf(b, false)),
        Formula::And(a, b) if positive => Formula::and(nnf(a, true), nnf(b, true)),
        Formula::And(a, b) => Formula::or(nnf(a, false), nnf(b, false)),
        Formula::Or(a, b) if positive => Formula::or(nnf(a, true), nnf(b, true)),
        Formula::Or(a, b) => Formula::and(nnf(a, false), nnf(b, false)),
        Formula::Implies(a, b) if positive => Formula::or(nnf(a, false), nnf(b, true)),
        Formula::Implies(a, b) => Formula::and(nnf(a, true), nnf(b, false)),
        atom if positive => atom.clone(),
        atom => Formula::not(atom.clone()),
    }
}

// Equality elimination ------------------------------------------------------

/// If `f` states `x = t` (expanded at higher type) with `t` free of `x`,
/// returns `t`.
pub(crate) fn as_equality_with(f: &Formula, x: &Var) -> Option<Term> {
    match_equality(f, &x.term(), &x.ty).filter(|t| !t.mentions(&x.name))
}

/// The `y` for which `f` is the expanded equality `lhs =_ty y`, matched
/// with `lhs` on either side of each atom. Sequence types match the
/// length-and-entries form.
fn match_equality(f: &Formula, lhs: &Term, ty: &FiniteType) -> Option<Term> {
    let (args, res) = ty.uncurry();
    let mut zs = Vec::new();
    let mut cur = f;
    for _ in &args {
        let Formula::Forall(z, body) = cur else {
            return None;
        };
        zs.push(z.clone());
        cur = body;
    }
    let applied = Term::apps(lhs.clone(), zs.iter().map(Var::term));
    let other = match (&res, cur) {
        (FiniteType::Nat, Formula::AtomEq0(l, r)) if *l == applied => r.clone(),
        (FiniteType::Nat, Formula::AtomEq0(l, r)) if *r == applied => l.clone(),
        (FiniteType::Seq(elem), Formula::And(same_len, entries)) => {
            let Formula::AtomEq0(Term::SeqLen(l), Term::SeqLen(r)) = &**same_len else {
                return None;
            };
            let other = if **l == applied {
                (**r).clone()
            } else if **r == applied {
                (**l).clone()
            } else {
                return None;
            };
            let Formula::Forall(i, entry) = &**entries else {
                return None;
            };
            let got = match_equality(entry, &Term::idx(applied.clone(), i.term()), elem)?;
            if got != Term::idx(other.clone(), i.term()) {
                return None;
            }
            other
        }
        _ => return None,
    };
    let t = strip_args(&other, &zs)?;
    if zs.iter().any(|z| t.mentions(&z.name)) {
        return None;
    }
    Some(t)
}

fn strip_args(t: &Term, zs: &[Var]) -> Option<Term> {
    let mut cur = t;
    for z in zs.iter().rev() {
        match cur {
            Term::App(f, a) if a.as_var() == Some(z) => cur = f,
            _ => return None,
        }
    }
    Some(cur.clone())
}

enum Layer {
    ForallIn(Var, Term),
    ExistsIn(Var, Term),
    Forall(Var),
    Exists(Var),
    BForall(Var, Term),
    BExists(Var, Term),
}

fn peel(f: &Formula) -> (Vec<Layer>, &Formula) {
    let mut layers = Vec::new();
    let mut cur = f;
    loop {
        if let Some((w, s, b)) = cur.as_forall_in() {
            layers.push(Layer::ForallIn(w.clone(), s.clone()));
            cur = b;
            continue;
        }
        if let Some((w, s, b)) = cur.as_exists_in() {
            layers.push(Layer::ExistsIn(w.clone(), s.clone()));
            cur = b;
            continue;
        }
        match cur {
            Formula::Forall(x, _) => layers.push(Layer::Forall(x.clone())),
            Formula::Exists(x, _) => layers.push(Layer::Exists(x.clone())),
            Formula::BForall(x, t, _) => layers.push(Layer::BForall(x.clone(), t.clone())),
            Formula::BExists(x, t, _) => layers.push(Layer::BExists(x.clone(), t.clone())),
            _ => return (layers, cur),
        }
        cur = cur.children()[0];
    }
}

fn rebuild(layers: &[Layer], inner: Formula) -> Formula {
    layers.iter().rev().fold(inner, |acc, l| match l {
        Layer::ForallIn(w, s) => Formula::forall_in(w.clone(), s.clone(), acc),
        Layer::ExistsIn(w, s) => Formula::exists_in(w.clone(), s.clone(), acc),
        Layer::Forall(x) => Formula::forall(x.clone(), acc),
        Layer::Exists(x) => Formula::exists(x.clone(), acc),
        Layer::BForall(x, t) => Formula::bforall(x.clone(), t.clone(), acc),
        Layer::BExists(x, t) => Formula::bexists(x.clone(), t.clone(), acc),
    })
}

fn layer_var(l: &Layer) -> &Var {
    match l {
        Layer::ForallIn(v, _)
        | Layer::ExistsIn(v, _)
        | Layer::Forall(v)
        | Layer::Exists(v)
        | Layer::BForall(v, _)
        | Layer::BExists(v, _) => v,
    }
}

// Removes a disjunct `x ≠ t`; `None` in the remainder means nothing is left.
fn take_neq(m: &Formula, x: &Var) -> Option<(Term, Option<Formula>)> {
    match m {
        Formula::Not(e) => as_equality_with(e, x).map(|t| (t, None)),
        Formula::Or(a, b) => {
            if let Some((t, ra)) = take_neq(a, x) {
                return Some((
                    t,
                    Some(ra.map_or((**b).clone(), |a2| Formula::or(a2, (**b).clone()))),
                ));
            }
            let (t, rb) = take_neq(b, x)?;
            Some((
                t,
                Some(rb.map_or((**a).clone(), |b2| Formula::or((**a).clone(), b2))),
            ))
        }
        Formula::Implies(a, b) => {
            if let Some(t) = as_equality_with(a, x) {
                return Some((t, Some((**b).clone())));
            }
            let (t, rb) = take_neq(b, x)?;
            Some((
                t,
                Some(rb.map_or(Formula::not((**a).clone()), |b2| {
                    Formula::implies((**a).clone(), b2)
                })),
            ))
        }
        _ => None,
    }
}

// Removes a conjunct `x = t`.
fn take_eq(m: &Formula, x: &Var) -> Option<(Term, Option<Formula>)> {
    if let Some(t) = as_equality_with(m, x) {
        return Some((t, None));
    }
    match m {
        Formula::And(a, b) => {
            if let Some((t, ra)) = take_eq(a, x) {
                return Some((
                    t,
                    Some(ra.map_or((**b).clone(), |a2| Formula::and(a2, (**b).clone()))),
                ));
            }
            let (t, rb) = take_eq(b, x)?;
            Some((
                t,
                Some(rb.map_or((**a).clone(), |b2| Formula::and((**a).clone(), b2))),
            ))
        }
        _ => None,
    }
}

fn eliminate_equality(f: &Formula, names: &mut NameSupply) -> Option<Formula> {
    if f.as_forall_in().is_some() || f.as_exists_in().is_some() {
        return None;
    }
    let (x, body, universal) = match f {
        Formula::Forall(x, b) => (x, b, true),
        Formula::Exists(x, b) => (x, b, false),
        _ => return None,
    };
    let (layers, m) = peel(body);
    let (t, rest) = if universal {
        take_neq(m, x)?
    } else {
        take_eq(m, x)?
    };
    if layers.iter().any(|l| t.mentions(&layer_var(l).name)) {
        return None;
    }
    let rest = rest.unwrap_or_else(|| {
        if universal {
            Formula::bottom()
        } else {
            Formula::top()
        }
    });
    Some(rebuild(&layers, rest).substitute(x, &t, names))
}

// Tuple rules --------------------------------------------------------------

fn vacuous_component(nf: &NormalForm) -> Option<NormalForm> {
    let free: Vec<String> = nf.matrix.free_vars().into_iter().map(|v| v.name).collect();
    let used = |v: &Var| free.contains(&v.name);
    if let Some(i) = nf.univ.vars().iter().position(|v| !used(v)) {
        let mut univ = nf.univ.vars().to_vec();
        univ.remove(i);
        return Some(NormalForm::raw(
            univ,
            nf.exist.vars().to_vec(),
            nf.matrix.clone(),
        ));
    }
    if let Some(i) = nf.exist.vars().iter().position(|v| !used(v)) {
        let mut exist = nf.exist.vars().to_vec();
        exist.remove(i);
        return Some(NormalForm::raw(
            nf.univ.vars().to_vec(),
            exist,
            nf.matrix.clone(),
        ));
    }
    None
}

#[derive(Clone, Copy, PartialEq)]
enum Polarity {
    /// Through `∧`, `∨`, `∃`, bounded `∃` and consequents.
    Existential,
    /// Through `∧`, `∨`, `∀`, bounded `∀` and consequents.
    Universal,
}

struct Hit {
    inner: Var,
    seq: Term,
    body: Formula,
    binders: Vec<String>,
}

/// Finds the first occurrence of a membership quantifier of the given
/// polarity whose sequence satisfies `wanted`, and replaces it by `subst`.
fn replace_occurrence(
    f: &Formula,
    pol: Polarity,
    wanted: &dyn Fn(&Term) -> bool,
    binders: &mut Vec<String>,
    on_hit: &mut dyn FnMut(Hit) -> Formula,
) -> Option<Formula> {
    let view = match pol {
        Polarity::Existential => f.as_exists_in(),
        Polarity::Universal => f.as_forall_in(),
    };
    if let Some((w, s, body)) = view {
        if wanted(s) {
            return Some(on_hit(Hit {
                inner: w.clone(),
                seq: s.clone(),
                body: body.clone(),
                binders: binders.clone(),
            }));
        }
    }
    let descend = |b: &Formula,
                   x: Option<&Var>,
                   binders: &mut Vec<String>,
                   on_hit: &mut dyn FnMut(Hit) -> Formula| {
        if let Some(x) = x {
            binders.push(x.name.clone());
        }
        let r = replace_occurrence(b, pol, wanted, binders, on_hit);
        if x.is_some() {
            binders.pop();
        }
        r
    };
    match (f, pol) {
        (Formula::And(a, b), _) | (Formula::Or(a, b), _) => {
            if let Some(a2) = descend(a, None, binders, on_hit) {
                return Some(f.with_children(vec![a2, (**b).clone()]));
            }
            let b2 = descend(b, None, binders, on_hit)?;
            Some(f.with_children(vec![(**a).clone(), b2]))
        }
        (Formula::Implies(a, b), _) => {
            let b2 = descend(b, None, binders, on_hit)?;
            Some(Formula::implies((**a).clone(), b2))
        }
        (Formula::Exists(x, b), Polarity::Existential)
        | (Formula::BExists(x, _, b), Polarity::Existential)
        | (Formula::Forall(x, b), Polarity::Universal)
        | (Formula::BForall(x, _, b), Polarity::Universal) => {
            let b2 = descend(b, Some(x), binders, on_hit)?;
            Some(f.with_children(vec![b2]))
        }
        _ => None,
    }
}

fn pick_name(v: &Var, taken: &[String], names: &mut NameSupply) -> Var {
    if taken.contains(&v.name) {
        Var::new(names.fresh(&v.name), v.ty.clone())
    } else {
        v.clone()
    }
}

fn sequence_witness(nf: &NormalForm, names: &mut NameSupply) -> Option<NormalForm> {
    for (i, w) in nf.exist.vars().iter().enumerate() {
        if !matches!(w.ty, FiniteType::Seq(_)) {
            continue;
        }
        let target = w.term();
        let is_target = |s: &Term| *s == target;
        let mut hit = None;
        replace_occurrence(
            &nf.matrix,
            Polarity::Existential,
            &is_target,
            &mut Vec::new(),
            &mut |h| {
                let body = h.body.clone();
                hit = Some(h);
                body
            },
        );
        let Some(hit) = hit else {
            continue;
        };
        let mut taken: Vec<String> = nf.matrix.free_vars().into_iter().map(|v| v.name).collect();
        taken.extend(nf.univ.names().map(String::from));
        taken.extend(nf.exist.names().map(String::from));
        taken.extend(hit.binders.iter().cloned());
        let new = pick_name(&hit.inner, &taken, names);
        let inner = hit.inner.clone();
        let matrix = replace_occurrence(
            &nf.matrix,
            Polarity::Existential,
            &is_target,
            &mut Vec::new(),
            &mut |h| {
                if new == inner {
                    h.body
                } else {
                    h.body.substitute(&inner, &new.term(), names)
                }
            },
        )?;
        if matrix.mentions(&w.name) {
            continue;
        }
        let mut exist = nf.exist.vars().to_vec();
        exist[i] = new;
        return Some(NormalForm::raw(nf.univ.vars().to_vec(), exist, matrix));
    }
    None
}

fn constant_functional(nf: &NormalForm, names: &mut NameSupply) -> Option<NormalForm> {
    for (i, big) in nf.univ.vars().iter().enumerate() {
        let (_, res) = big.ty.uncurry();
        if !matches!(res, FiniteType::Seq(_)) {
            continue;
        }
        let exist = &nf.exist;
        let is_target = |s: &Term| {
            let (head, args) = s.spine();
            head.as_var() == Some(big)
                && args
                    .iter()
                    .all(|a| a.as_var().is_some_and(|v| exist.contains(&v.name)))
        };
        let mut hit = None;
        replace_occurrence(
            &nf.matrix,
            Polarity::Universal,
            &is_target,
            &mut Vec::new(),
            &mut |h| {
                let body = h.body.clone();
                hit = Some(h);
                body
            },
        );
        let Some(hit) = hit else {
            continue;
        };
        let args: Vec<Var> = hit
            .seq
            .spine()
            .1
            .iter()
            .filter_map(|a| a.as_var().cloned())
            .collect();
        if (1..args.len()).any(|k| args[..k].contains(&args[k])) {
            continue;
        }
        if exist.vars().iter().any(|y| hit.body.mentions(&y.name)) {
            continue;
        }
        let others = exist.vars().iter().filter(|y| !args.contains(y)).count();
        if others > 0 && !hit.binders.is_empty() {
            continue;
        }
        let mut taken: Vec<String> = nf.matrix.free_vars().into_iter().map(|v| v.name).collect();
        taken.extend(nf.univ.names().map(String::from));
        taken.extend(nf.exist.names().map(String::from));
        taken.extend(hit.binders.iter().cloned());
        let new = pick_name(&hit.inner, &taken, names);
        let inner = hit.inner.clone();
        let matrix = replace_occurrence(
            &nf.matrix,
            Polarity::Universal,
            &is_target,
            &mut Vec::new(),
            &mut |h| {
                if new == inner {
                    h.body
                } else {
                    h.body.substitute(&inner, &new.term(), names)
                }
            },
        )?;
        if matrix.mentions(&big.name) || args.iter().any(|a| matrix.mentions(&a.name)) {
            continue;
        }
        let mut univ = nf.univ.vars().to_vec();
        univ[i] = new;
        let exist: Vec<Var> = exist
            .vars()
            .iter()
            .filter(|y| !args.contains(y))
            .cloned()
            .collect();
        return Some(NormalForm::raw(univ, exist, matrix));
    }
    None
}
