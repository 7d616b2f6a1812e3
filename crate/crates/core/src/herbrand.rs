//! From normal forms to term-extraction goals.
//!
//! An implication between two normal forms is folded into one normal form,
//! which is then stripped of `st` and turned into an [`Obligation`]: find a
//! term `t` with `(∀x̲)(∃y̲ ∈ t(x̲))φ`. Number-typed witnesses used only as
//! upper bounds can be collapsed to a single value by taking the maximum of
//! the candidate sequence, and the pointwise Herbrandisation restricts the
//! antecedent of an implication to finitely many instances.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{is_internal, BinderTuple, Formula, FormulaError};
use crate::fresh::NameSupply;
use crate::library;
use crate::sst::{NormalForm, SstError};
use crate::term::{Term, Var};
use crate::types::FiniteType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HerbrandError {
    #[error("component `{component}` cannot be collapsed: {reason}")]
    NotMonotone { component: String, reason: String },
    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),
    #[error("no output component `{0}`")]
    UnknownComponent(String),
    #[error(transparent)]
    Sst(#[from] SstError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

fn as_text<T: fmt::Display, S: serde::Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

fn reserve_all(names: &mut NameSupply, f: &Formula) {
    names.reserve(f.all_names());
}

/// Top-level conjuncts, in order.
pub fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(a, b) => {
            let mut out = conjuncts(a);
            out.extend(conjuncts(b));
            out
        }
        _ => vec![f],
    }
}

fn rename_components(
    vars: &[Var],
    clash: &HashSet<String>,
    names: &mut NameSupply,
) -> (Vec<Var>, Vec<(Var, Var)>) {
    let mut pairs = Vec::new();
    let renamed = vars
        .iter()
        .map(|v| {
            if clash.contains(&v.name) {
                let nv = Var::new(names.fresh(&v.name), v.ty.clone());
                pairs.push((v.clone(), nv.clone()));
                nv
            } else {
                v.clone()
            }
        })
        .collect();
    (renamed, pairs)
}

/// Folds `ante → cons` into a single normal form.
///
/// The antecedent's free variables are read as its leading standard
/// existentials, so they become standard universals of the result. Each
/// existential component of the antecedent is Skolemised by a fresh functional
/// (`Xi`, `Xi1`, …) over the universal components occurring in the conjuncts
/// that mention it.
///
/// With `drop_st` the antecedent's universals lose their `st` and are pushed
/// onto the conjuncts that use them, giving an internal antecedent. Without
/// it they turn into existential components of the result, placed before
/// the consequent's own.
pub fn implication_to_normal_form(
    ante: &NormalForm,
    cons: &NormalForm,
    drop_st: bool,
) -> Result<NormalForm, HerbrandError> {
    if ante.univ.is_empty() && ante.exist.is_empty() && ante.matrix.is_top() {
        return Ok(cons.clone());
    }
    let mut names = NameSupply::new();
    reserve_all(&mut names, &ante.render());
    reserve_all(&mut names, &cons.render());

    // Keep consequent components clear of everything in the antecedent and
    // the antecedent's components clear of the consequent's free variables.
    let ante_names: HashSet<String> = ante.render().all_names().into_iter().collect();
    let (c_univ, mut pairs) = rename_components(cons.univ.vars(), &ante_names, &mut names);
    let (c_exist, more) = rename_components(cons.exist.vars(), &ante_names, &mut names);
    pairs.extend(more);
    let c_matrix = cons.matrix.rename_free(&pairs, &mut names);
    let cons_free: HashSet<String> = c_univ
        .iter()
        .chain(&c_exist)
        .map(|v| v.name.clone())
        .chain(cons.params.names().map(str::to_string))
        .collect();
    let (a_univ, mut pairs) = rename_components(ante.univ.vars(), &cons_free, &mut names);
    let (a_exist, more) = rename_components(ante.exist.vars(), &cons_free, &mut names);
    pairs.extend(more);
    let a_matrix = ante.matrix.rename_free(&pairs, &mut names);

    let mut skolems = Vec::new();
    let mut a_matrix = a_matrix;
    for y in &a_exist {
        let parts = conjuncts(&a_matrix);
        let args: Vec<Var> = a_univ
            .iter()
            .filter(|x| {
                parts
                    .iter()
                    .any(|c| c.mentions(&y.name) && c.mentions(&x.name))
            })
            .cloned()
            .collect();
        let ty = FiniteType::curried(args.iter().map(|x| x.ty.clone()), y.ty.clone());
        let xi = Var::new(names.fresh("Xi"), ty);
        let app = Term::apps(xi.term(), args.iter().map(Var::term));
        a_matrix = a_matrix.substitute(y, &app, &mut names);
        skolems.push(xi);
    }

    let mut univ: Vec<Var> = ante.params.vars().to_vec();
    univ.extend(skolems);
    for v in c_univ {
        if !univ.iter().any(|u| u.name == v.name) {
            univ.push(v);
        }
    }

    let (antecedent, exist) = if drop_st {
        let parts: Vec<Formula> = conjuncts(&a_matrix)
            .into_iter()
            .map(|c| {
                let used: Vec<Var> = a_univ
                    .iter()
                    .filter(|x| c.mentions(&x.name))
                    .cloned()
                    .collect();
                Formula::forall_all(&used, c.clone())
            })
            .collect();
        (Formula::conj_left(parts), c_exist)
    } else {
        let mut exist = a_univ;
        exist.extend(c_exist);
        (a_matrix, exist)
    };
    Ok(NormalForm::new(
        univ,
        exist,
        Formula::implies(antecedent, c_matrix),
    )?)
}

/// A value hole obtained by collapsing a sequence hole.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collapse {
    pub component: String,
    pub hole: String,
    /// `λx̲. maxseq(t x̲)`.
    #[serde(serialize_with = "as_text")]
    pub definition: Term,
    pub justification: String,
}

/// `(∀x̲)(∃y̲ ∈ t(x̲))φ` with the term `t` still to be found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obligation {
    pub name: String,
    pub inputs: BinderTuple,
    pub outputs: BinderTuple,
    #[serde(serialize_with = "as_text")]
    pub matrix: Formula,
    /// Base name of the hole. With several outputs each gets its own
    /// `<hole>_<output>`.
    pub hole: String,
    /// One hole per output, typed `inputs → output*`.
    pub holes: Vec<Var>,
    pub collapses: Vec<Collapse>,
}

impl Obligation {
    fn hole_term(&self, hole: &Var) -> Term {
        Term::apps(hole.term(), self.inputs.terms())
    }

    pub fn to_formula(&self) -> Formula {
        let body = self
            .outputs
            .vars()
            .iter()
            .zip(&self.holes)
            .rev()
            .fold(self.matrix.clone(), |acc, (y, h)| {
                Formula::exists_in(y.clone(), self.hole_term(h), acc)
            });
        Formula::forall_all(self.inputs.vars(), body)
    }

    /// Puts `st` back: membership in a hole becomes a standard existential.
    pub fn re_relativize(&self) -> Formula {
        Formula::forall_st_all(
            self.inputs.vars(),
            Formula::exists_st_all(self.outputs.vars(), self.matrix.clone()),
        )
    }

    fn names(&self) -> NameSupply {
        let mut names = NameSupply::new();
        reserve_all(&mut names, &self.to_formula());
        names.reserve(self.collapses.iter().map(|c| c.hole.clone()));
        names
    }
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

fn claim(names: &mut NameSupply, cand: String) -> String {
    if names.is_used(&cand) {
        names.fresh(&cand)
    } else {
        names.reserve([cand.clone()]);
        cand
    }
}

/// Strips `st` from `nf`: the existential components range over sequences
/// produced by the hole.
pub fn extraction_obligation(nf: &NormalForm, hole: &str) -> Obligation {
    let mut names = NameSupply::new();
    reserve_all(&mut names, &nf.render());
    let base = claim(&mut names, hole.to_string());
    let single = nf.exist.len() == 1;
    let holes = nf
        .exist
        .vars()
        .iter()
        .map(|y| {
            let name = if single {
                base.clone()
            } else {
                claim(&mut names, format!("{base}_{}", y.name))
            };
            let ty = FiniteType::curried(nf.univ.types(), FiniteType::seq(y.ty.clone()));
            Var::new(name, ty)
        })
        .collect();
    Obligation {
        name: hole.to_string(),
        inputs: nf.univ.clone(),
        outputs: nf.exist.clone(),
        matrix: nf.matrix.clone(),
        hole: base,
        holes,
        collapses: Vec::new(),
    }
}

/// Checks that `n` occurs in `f` only where enlarging it can only help:
/// as the bound of a bounded existential or the right side of `≤` in
/// positive position, dually in negative position.
pub fn check_upward(f: &Formula, n: &str, positive: bool) -> Result<(), String> {
    let bad = |what: &str| Err(format!("occurs {what}"));
    match f {
        Formula::AtomEq0(l, r) => {
            if !l.mentions(n) && !r.mentions(n) {
                return Ok(());
            }
            match f.as_le() {
                Some((a, Term::Var(v))) if v.name == n && !a.mentions(n) => {
                    if positive {
                        Ok(())
                    } else {
                        bad("as an upper bound in negative position")
                    }
                }
                Some((Term::Var(v), b)) if v.name == n && !b.mentions(n) => {
                    if positive {
                        bad("as a lower bound in positive position")
                    } else {
                        Ok(())
                    }
                }
                _ => bad(&format!("inside the atom {f}")),
            }
        }
        Formula::St(..) | Formula::MemSeq(..) => {
            if f.node_terms().iter().any(|t| t.mentions(n)) {
                bad(&format!("inside {f}"))
            } else {
                Ok(())
            }
        }
        Formula::Not(a) => check_upward(a, n, !positive),
        Formula::Or(a, b) | Formula::And(a, b) => {
            check_upward(a, n, positive)?;
            check_upward(b, n, positive)
        }
        Formula::Implies(a, b) => {
            check_upward(a, n, !positive)?;
            check_upward(b, n, positive)
        }
        Formula::Forall(x, body)
        | Formula::Exists(x, body)
        | Formula::ForallSt(x, body)
        | Formula::ExistsSt(x, body) => {
            if x.name == n {
                Ok(())
            } else {
                check_upward(body, n, positive)
            }
        }
        Formula::BForall(m, bound, body) | Formula::BExists(m, bound, body) => {
            let existential = matches!(f, Formula::BExists(..));
            match bound {
                Term::Var(v) if v.name == n => {
                    if existential != positive {
                        return bad(&format!("as a bound of {f} with the wrong polarity"));
                    }
                }
                t if t.mentions(n) => return bad(&format!("inside the bound of {f}")),
                _ => {}
            }
            if m.name == n {
                Ok(())
            } else {
                check_upward(body, n, positive)
            }
        }
    }
}

/// Replaces the candidate sequence of a number-typed output by its maximum.
///
/// Sound only when the output is upward monotone in the matrix, which is
/// checked syntactically.
pub fn collapse_witnesses(ob: &Obligation, component: &str) -> Result<Obligation, HerbrandError> {
    let idx = ob
        .outputs
        .vars()
        .iter()
        .position(|v| v.name == component)
        .ok_or_else(|| HerbrandError::UnknownComponent(component.to_string()))?;
    let y = ob.outputs.vars()[idx].clone();
    let not_monotone = |reason: String| HerbrandError::NotMonotone {
        component: component.to_string(),
        reason,
    };
    if !y.ty.is_nat() {
        return Err(not_monotone(format!("it has type {}, not 0", y.ty)));
    }
    check_upward(&ob.matrix, component, true).map_err(not_monotone)?;

    let mut names = ob.names();
    let name = if ob.holes.len() == 1 && ob.collapses.is_empty() {
        claim(&mut names, "s".into())
    } else {
        claim(&mut names, format!("s_{component}"))
    };
    let s = Var::new(
        name.clone(),
        FiniteType::curried(ob.inputs.types(), FiniteType::Nat),
    );
    let t = &ob.holes[idx];
    let definition = ob.inputs.vars().iter().rev().fold(
        Term::app(library::term("maxseq"), ob.hole_term(t)),
        |acc, x| Term::lam(x.clone(), acc),
    );
    let value = Term::apps(s.term(), ob.inputs.terms());
    let matrix = ob.matrix.substitute(&y, &value, &mut names);

    let mut outputs = ob.outputs.vars().to_vec();
    outputs.remove(idx);
    let mut holes = ob.holes.clone();
    holes.remove(idx);
    let mut collapses = ob.collapses.clone();
    collapses.push(Collapse {
        component: component.to_string(),
        hole: name,
        definition,
        justification: format!("{component} occurs only as an upper bound in positive position"),
    });
    Ok(Obligation {
        name: ob.name.clone(),
        inputs: ob.inputs.clone(),
        outputs: BinderTuple::new(outputs)?,
        matrix,
        hole: ob.hole.clone(),
        holes,
        collapses,
    })
}

/// How the existential components of an implication's normal form are
/// grouped: each slot becomes one finite family of antecedent instances,
/// the output is the single conclusion witness.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub slots: Vec<Vec<String>>,
    pub output: Option<String>,
}

impl Partition {
    pub fn new<S: Into<String>>(
        slots: impl IntoIterator<Item = Vec<S>>,
        output: Option<&str>,
    ) -> Self {
        Partition {
            slots: slots
                .into_iter()
                .map(|s| s.into_iter().map(Into::into).collect())
                .collect(),
            output: output.map(str::to_string),
        }
    }
}

/// The pointwise Herbrandisation of an implication's normal form
/// `(∀st x̲)(∃st y̲)[A → B]`.
///
/// The conjuncts of `A` are grouped by the slot whose components they
/// mention and universally restricted to sequences `i<j>(x̲)`; the output
/// component in `B` is replaced by the value `o(x̲)`.
pub fn herbrandise_pointwise(
    nf: &NormalForm,
    partition: &Partition,
) -> Result<Formula, HerbrandError> {
    let mismatch = |m: String| HerbrandError::PartitionMismatch(m);
    let mut declared: Vec<&str> = partition
        .slots
        .iter()
        .flatten()
        .map(String::as_str)
        .collect();
    declared.extend(partition.output.as_deref());
    let mut seen = HashSet::new();
    for name in &declared {
        if !nf.exist.contains(name) {
            return Err(mismatch(format!(
                "`{name}` is not an existential component"
            )));
        }
        if !seen.insert(*name) {
            return Err(mismatch(format!("`{name}` is declared twice")));
        }
    }
    if let Some(y) = nf.exist.names().find(|y| !seen.contains(y)) {
        return Err(mismatch(format!(
            "component `{y}` is not covered by any slot"
        )));
    }

    let (parts, consequent): (Vec<&Formula>, &Formula) = if partition.slots.is_empty() {
        (Vec::new(), &nf.matrix)
    } else {
        match &nf.matrix {
            Formula::Implies(a, b) => (conjuncts(a), &**b),
            other => return Err(mismatch(format!("matrix is not an implication: {other}"))),
        }
    };
    let slot_of = |name: &str| {
        partition
            .slots
            .iter()
            .position(|s| s.iter().any(|c| c == name))
    };
    let mut grouped: Vec<Vec<Formula>> = vec![Vec::new(); partition.slots.len()];
    let mut plain = Vec::new();
    for part in parts {
        if let Some(out) = &partition.output {
            if part.mentions(out) {
                return Err(mismatch(format!(
                    "output `{out}` occurs in the antecedent: {part}"
                )));
            }
        }
        let mut hit: Vec<usize> = nf
            .exist
            .names()
            .filter(|y| part.mentions(y))
            .filter_map(slot_of)
            .collect();
        hit.dedup();
        match hit.as_slice() {
            [] => plain.push(part.clone()),
            [j] => grouped[*j].push(part.clone()),
            _ => return Err(mismatch(format!("conjunct {part} spans several slots"))),
        }
    }
    for slot in &partition.slots {
        if let Some(c) = slot.iter().find(|c| consequent.mentions(c)) {
            return Err(mismatch(format!(
                "slot component `{c}` occurs in the conclusion"
            )));
        }
    }

    let mut names = NameSupply::new();
    reserve_all(&mut names, &nf.render());
    let inputs = nf.univ.terms();
    let hole_ty = |ty: &FiniteType| FiniteType::curried(nf.univ.types(), ty.clone());
    let component = |name: &str| {
        nf.exist
            .vars()
            .iter()
            .find(|v| v.name == name)
            .cloned()
            .expect("checked above")
    };

    let mut antecedent = Vec::new();
    for (j, (slot, body)) in partition.slots.iter().zip(grouped).enumerate() {
        if body.is_empty() {
            continue;
        }
        let single = slot.len() == 1;
        let body = slot.iter().rev().fold(Formula::conj_left(body), |acc, c| {
            let y = component(c);
            let name = if single {
                claim(&mut names, format!("i{}", j + 1))
            } else {
                claim(&mut names, format!("i{}_{}", j + 1, y.name))
            };
            let hole = Var::new(name, hole_ty(&FiniteType::seq(y.ty.clone())));
            Formula::forall_in(y, Term::apps(hole.term(), inputs.clone()), acc)
        });
        antecedent.push(body);
    }
    antecedent.extend(plain);

    let conclusion = match &partition.output {
        Some(out) => {
            let y = component(out);
            if !y.ty.is_nat() {
                return Err(HerbrandError::NotMonotone {
                    component: out.clone(),
                    reason: format!("it has type {}, not 0", y.ty),
                });
            }
            check_upward(consequent, out, true).map_err(|reason| HerbrandError::NotMonotone {
                component: out.clone(),
                reason,
            })?;
            let o = Var::new(claim(&mut names, "o".into()), hole_ty(&FiniteType::Nat));
            consequent.substitute(&y, &Term::apps(o.term(), inputs.clone()), &mut names)
        }
        None => consequent.clone(),
    };
    let body = if antecedent.is_empty() {
        conclusion
    } else {
        Formula::implies(Formula::conj_left(antecedent), conclusion)
    };
    let her = Formula::forall_all(nf.univ.vars(), body);
    debug_assert!(is_internal(&her));
    Ok(her)
}

/// Reads the leading universals over `inputs` as standard ones, as when the
/// hole terms are closed and hence standard.
pub fn standard_reading(her: &Formula, inputs: &[Var]) -> Formula {
    let mut cur = her;
    let mut bound = Vec::new();
    while let Formula::Forall(x, body) = cur {
        if bound.len() == inputs.len() || inputs[bound.len()].name != x.name {
            break;
        }
        bound.push(x.clone());
        cur = body;
    }
    Formula::forall_st_all(&bound, cur.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate;
    use crate::formula::alpha_equal;
    use crate::sst::{fixed_point_check, read_normal_form};
    use crate::syntax::{parse_formula, Signature};

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare_const(
            "bar",
            FiniteType::curried(vec![FiniteType::one(), FiniteType::Nat], FiniteType::Nat),
        );
        s.declare_var(
            "Phi",
            FiniteType::arrow(FiniteType::one(), FiniteType::one()),
        );
        s
    }

    fn p(src: &str) -> Formula {
        parse_formula(src, &sig()).unwrap()
    }

    fn nf(src: &str) -> NormalForm {
        read_normal_form(&p(src)).unwrap()
    }

    const ANTE: &str = "forall^st T:1, U:1, S:1, k:0. exists^st N:0. \
        (forall n:0. T n <= 1) /\\ (bar U N = bar S N -> bar (Phi U) k = bar (Phi S) k)";
    const CONS: &str =
        "forall^st f:1. exists^st i:0. (exists n:0. f n = 0) -> exists m <= i. f m = 0";

    #[test]
    fn dropping_st_gives_internal_antecedent() {
        let c = implication_to_normal_form(&nf(ANTE), &nf(CONS), true).unwrap();
        let want = p("forall^st Phi:1->1, Xi:1->1->0->0, f:1. exists^st i:0. \
            (forall T:1. forall n:0. T n <= 1) /\\ \
            (forall U:1, S:1, k:0. bar U (Xi U S k) = bar S (Xi U S k) -> bar (Phi U) k = bar (Phi S) k) \
            -> (exists n:0. f n = 0) -> exists m <= i. f m = 0");
        assert!(alpha_equal(&c.render(), &want), "{c}");
        assert!(fixed_point_check(&c.render()).unwrap());
    }

    #[test]
    fn keeping_st_moves_antecedent_universals_to_outputs() {
        let d = implication_to_normal_form(&nf(ANTE), &nf(CONS), false).unwrap();
        let want = p(
            "forall^st Phi:1->1, Xi:1->1->0->0, f:1. exists^st T:1, U:1, S:1, k:0, i:0. \
            (forall n:0. T n <= 1) /\\ \
            (bar U (Xi U S k) = bar S (Xi U S k) -> bar (Phi U) k = bar (Phi S) k) \
            -> (exists n:0. f n = 0) -> exists m <= i. f m = 0",
        );
        assert!(alpha_equal(&d.render(), &want), "{d}");
        assert!(fixed_point_check(&d.render()).unwrap());
    }

    #[test]
    fn vacuous_antecedent_and_name_clashes() {
        let cons = nf(CONS);
        let top = NormalForm::internal(Formula::top()).unwrap();
        assert_eq!(implication_to_normal_form(&top, &cons, true).unwrap(), cons);
        // The antecedent's free `f` must not be captured by the consequent's `f`.
        let mut s = sig();
        s.declare_var("f", FiniteType::one());
        let ante = read_normal_form(&parse_formula("forall^st k:0. f k = 0", &s).unwrap()).unwrap();
        let r = implication_to_normal_form(&ante, &cons, true).unwrap();
        assert_eq!(r.univ.len(), 2);
        assert_ne!(r.univ.vars()[0].name, r.univ.vars()[1].name);
    }

    #[test]
    fn obligation_round_trip_and_collapse() {
        let b = nf(CONS);
        let ob = extraction_obligation(&b, "t");
        let mut s = sig();
        s.declare_var(
            "t",
            FiniteType::arrow(FiniteType::one(), FiniteType::seq(FiniteType::Nat)),
        );
        let want = parse_formula(
            "forall f:1. exists i:0 in t f. (exists n:0. f n = 0) -> exists m <= i. f m = 0",
            &s,
        )
        .unwrap();
        assert!(alpha_equal(&ob.to_formula(), &want), "{ob}");
        assert!(alpha_equal(&ob.re_relativize(), &b.render()));

        let c = collapse_witnesses(&ob, "i").unwrap();
        assert!(c.outputs.is_empty());
        assert_eq!(c.collapses[0].hole, "s");
        s.declare_var("s", FiniteType::arrow(FiniteType::one(), FiniteType::Nat));
        let want = parse_formula(
            "forall f:1. (exists n:0. f n = 0) -> exists m <= s f. f m = 0",
            &s,
        )
        .unwrap();
        assert!(alpha_equal(&c.to_formula(), &want), "{c}");
    }

    #[test]
    fn collapse_of_singleton_is_identity() {
        let ob = extraction_obligation(&nf("forall^st x:0. exists^st y:0. x <= y"), "t");
        let c = collapse_witnesses(&ob, "y").unwrap();
        // Plug t := λx. ⟨x+3⟩ into s = λx. maxseq(t x).
        let t = &ob.holes[0];
        let x = Var::nat("x");
        let realiser = Term::lam(
            x.clone(),
            Term::seq_lit(
                FiniteType::Nat,
                [Term::apps(library::term("add"), [x.term(), Term::num(3)])],
            ),
        );
        let mut names = NameSupply::new();
        let def = c.collapses[0]
            .definition
            .substitute(t, &realiser, &mut names);
        let v = evaluate(&Term::app(def, Term::num(4)), 10_000).unwrap();
        assert_eq!(v.as_nat(), Some(7));
    }

    #[test]
    fn collapse_rejects_lower_bounds() {
        let ob = extraction_obligation(
            &nf("forall^st f:1. exists^st n:0. exists m:0. n <= m /\\ f m = 0"),
            "t",
        );
        assert!(matches!(
            collapse_witnesses(&ob, "n"),
            Err(HerbrandError::NotMonotone { .. })
        ));
        let ob = extraction_obligation(&nf("forall^st f:1. exists^st n:0. f n = 0"), "t");
        assert!(matches!(
            collapse_witnesses(&ob, "n"),
            Err(HerbrandError::NotMonotone { .. })
        ));
        assert!(matches!(
            collapse_witnesses(&ob, "q"),
            Err(HerbrandError::UnknownComponent(_))
        ));
    }

    #[test]
    fn pointwise_herbrandisation() {
        let d = implication_to_normal_form(&nf(ANTE), &nf(CONS), false).unwrap();
        let part = Partition::new([vec!["T"], vec!["U", "S", "k"]], Some("i"));
        let her = herbrandise_pointwise(&d, &part).unwrap();
        assert!(is_internal(&her));
        assert!(!has_standard_quantifier(&her));
        let text = her.to_string();
        assert!(text.contains("T:1 in i1 Phi Xi f"), "{text}");
        assert!(text.contains("exists m <= o Phi Xi f"), "{text}");

        let reading = standard_reading(&her, d.univ.vars());
        let (back, _) = crate::sst::translate(&reading).unwrap();
        assert_eq!(back.univ.len(), 3);
        assert!(back.exist.is_empty());
    }

    fn has_standard_quantifier(f: &Formula) -> bool {
        matches!(f, Formula::ForallSt(..) | Formula::ExistsSt(..))
            || f.children().into_iter().any(has_standard_quantifier)
    }

    #[test]
    fn partition_errors() {
        let d = implication_to_normal_form(&nf(ANTE), &nf(CONS), false).unwrap();
        let missing = Partition::new([vec!["T"]], Some("i"));
        assert!(matches!(
            herbrandise_pointwise(&d, &missing),
            Err(HerbrandError::PartitionMismatch(_))
        ));
        let split = Partition::new([vec!["T"], vec!["U", "S"], vec!["k"]], Some("i"));
        assert!(matches!(
            herbrandise_pointwise(&d, &split),
            Err(HerbrandError::PartitionMismatch(_))
        ));
        // No antecedent witnesses: the collapsed obligation.
        let b = nf(CONS);
        let plain =
            herbrandise_pointwise(&b, &Partition::new(Vec::<Vec<String>>::new(), Some("i")))
                .unwrap();
        assert_eq!(
            plain.to_string(),
            "forall f:1. (exists n:0. f n = 0) -> exists m <= o f. f m = 0"
        );
    }
}
