//! The `S_st` interpretation: every formula gets a normal form
//! `(∀st x̲)(∃st y̲)φ` with internal `φ`.

mod simplify;
mod translate;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{alpha_equal, is_internal, BinderTuple, Formula, FormulaError};
use crate::fresh::NameSupply;
use crate::term::Var;

pub use simplify::{
    apply_rule, cleanup_matrix, negation_normal_form, simplify, simplify_with, Rule, MAX_PASSES,
};
pub use translate::{
    check_negation_types, desugar_classical, translate, translate_session, Session,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SstError {
    #[error("not a normal form: {0}")]
    NotANormalForm(String),
    #[error("simplifier did not settle within {0} passes")]
    Runaway(usize),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// `(∀st univ)(∃st exist) matrix`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalForm {
    pub univ: BinderTuple,
    pub exist: BinderTuple,
    #[serde(serialize_with = "as_text")]
    pub matrix: Formula,
    /// Free variables of the rendering, for reporting.
    pub params: BinderTuple,
}

fn as_text<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

impl NormalForm {
    pub fn new(univ: Vec<Var>, exist: Vec<Var>, matrix: Formula) -> Result<Self, SstError> {
        if !is_internal(&matrix) {
            return Err(SstError::NotANormalForm(format!(
                "matrix is not internal: {matrix}"
            )));
        }
        let mut all = univ.clone();
        all.extend(exist.iter().cloned());
        BinderTuple::new(all)?;
        let mut nf = NormalForm {
            univ: BinderTuple::new(univ)?,
            exist: BinderTuple::new(exist)?,
            matrix,
            params: BinderTuple::empty(),
        };
        nf.refresh_params();
        Ok(nf)
    }

    /// `(∅; ∅; φ)` for internal `φ`.
    pub fn internal(matrix: Formula) -> Result<Self, SstError> {
        NormalForm::new(Vec::new(), Vec::new(), matrix)
    }

    // Construction without validation, for rewrites that preserve the invariants.
    pub(crate) fn raw(univ: Vec<Var>, exist: Vec<Var>, matrix: Formula) -> Self {
        let mut nf = NormalForm {
            univ: BinderTuple::new(univ).expect("distinct components"),
            exist: BinderTuple::new(exist).expect("distinct components"),
            matrix,
            params: BinderTuple::empty(),
        };
        nf.refresh_params();
        nf
    }

    pub(crate) fn refresh_params(&mut self) {
        let params: Vec<Var> = self
            .matrix
            .free_vars()
            .into_iter()
            .filter(|v| !self.univ.contains(&v.name) && !self.exist.contains(&v.name))
            .collect();
        self.params = BinderTuple::new(params).unwrap_or_default();
    }

    pub fn render(&self) -> Formula {
        Formula::forall_st_all(
            self.univ.vars(),
            Formula::exists_st_all(self.exist.vars(), self.matrix.clone()),
        )
    }

    pub fn is_component(&self, name: &str) -> bool {
        self.univ.contains(name) || self.exist.contains(name)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Reads `(∀st x̲)(∃st y̲)φ` off a formula with internal `φ`.
pub fn read_normal_form(f: &Formula) -> Result<NormalForm, SstError> {
    let mut univ = Vec::new();
    let mut exist = Vec::new();
    let mut cur = f;
    while let Formula::ForallSt(x, body) = cur {
        univ.push(x.clone());
        cur = body;
    }
    while let Formula::ExistsSt(y, body) = cur {
        exist.push(y.clone());
        cur = body;
    }
    if !is_internal(cur) {
        return Err(SstError::NotANormalForm(f.to_string()));
    }
    NormalForm::new(univ, exist, cur.clone()).map_err(|_| SstError::NotANormalForm(f.to_string()))
}

/// One logged rewrite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: String,
    #[serde(serialize_with = "as_text")]
    pub before: Formula,
    #[serde(serialize_with = "as_text")]
    pub after: Formula,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RewriteTrace {
    pub steps: Vec<TraceStep>,
}

impl RewriteTrace {
    pub fn push(&mut self, rule: impl Into<String>, before: Formula, after: Formula) {
        self.steps.push(TraceStep {
            rule: rule.into(),
            before,
            after,
        });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn extend(&mut self, other: RewriteTrace) {
        self.steps.extend(other.steps);
    }

    /// Re-runs every simplifier step on its recorded `before` and checks the
    /// recorded `after`, then checks that simplifier steps chain from the
    /// preceding clause result up to `result`. Returns the first mismatch.
    pub fn replay(&self, result: &Formula) -> Result<(), String> {
        let mut current: Option<&Formula> = None;
        for (i, step) in self.steps.iter().enumerate() {
            match Rule::from_name(&step.rule) {
                Some(rule) => {
                    if let Some(cur) = current {
                        if !alpha_equal(cur, &step.before) {
                            return Err(format!(
                                "step {i} ({}) does not continue the chain",
                                step.rule
                            ));
                        }
                    }
                    let nf =
                        read_normal_form(&step.before).map_err(|e| format!("step {i}: {e}"))?;
                    let mut names = NameSupply::new();
                    names.reserve(step.before.all_names());
                    let got = apply_rule(rule, &nf, &mut names)
                        .ok_or_else(|| format!("step {i}: {} does not apply", step.rule))?;
                    if !alpha_equal(&got.render(), &step.after) {
                        return Err(format!(
                            "step {i}: {} gives {} but trace records {}",
                            step.rule,
                            got.render(),
                            step.after
                        ));
                    }
                    current = Some(&step.after);
                }
                None => {
                    if step.rule != "desugar" {
                        current = Some(&step.after);
                    }
                }
            }
        }
        match current {
            Some(last) if alpha_equal(last, result) => Ok(()),
            Some(last) => Err(format!("trace ends at {last}, result is {result}")),
            None if self.steps.is_empty() => Ok(()),
            None => Err("trace has no result-producing step".into()),
        }
    }
}

/// Whether `f`, read as a normal form, is reproduced by the translation.
/// Both sides are brought to the simplifier's fixed point and their
/// matrices compared in negation normal form, up to renaming.
pub fn fixed_point_check(f: &Formula) -> Result<bool, SstError> {
    let own = read_normal_form(f)?;
    let (own, _) = simplify(&own)?;
    let (translated, _) = translate(f)?;
    let (translated, _) = simplify(&translated)?;
    let canonical = |mut nf: NormalForm| {
        nf.matrix = simplify::negation_normal_form(&nf.matrix);
        nf.render()
    };
    Ok(alpha_equal(&canonical(own), &canonical(translated)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature};
    use crate::types::FiniteType;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare_const(
            "psi0",
            FiniteType::curried(vec![FiniteType::Nat; 3], FiniteType::Nat),
        );
        s.declare_var("a", FiniteType::Nat);
        s.declare_var("f", FiniteType::one());
        s
    }

    fn p(src: &str) -> Formula {
        parse_formula(src, &sig()).unwrap()
    }

    #[test]
    fn reading_normal_forms() {
        let nf = read_normal_form(&p("forall^st x:0. exists^st y:0. psi0 x y a = 0")).unwrap();
        assert_eq!(nf.univ.len(), 1);
        assert_eq!(nf.exist.len(), 1);
        assert_eq!(nf.params.names().collect::<Vec<_>>(), ["a"]);
        assert!(matches!(
            read_normal_form(&p("exists^st y:0. forall^st x:0. psi0 x y a = 0")),
            Err(SstError::NotANormalForm(_))
        ));
        let internal = read_normal_form(&p("f a = 0")).unwrap();
        assert!(internal.univ.is_empty() && internal.exist.is_empty());
    }

    #[test]
    fn fixed_points() {
        for src in [
            "f a = 0",
            "forall^st x:0. exists^st y:0. psi0 x y a = 0",
            "forall^st f:1. exists^st i:0. (exists n:0. f n = 0) -> exists m <= i. f m = 0",
            "exists^st y:0. psi0 y y a = 0",
            "forall^st x:0. psi0 x x a = 0",
        ] {
            assert!(fixed_point_check(&p(src)).unwrap(), "{src}");
        }
        assert!(fixed_point_check(&p("st(a)")).is_err());
    }
}
