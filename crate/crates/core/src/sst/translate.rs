//! The five translation clauses, applied by structural recursion.
//!
//! Connectives outside `{st, ¬, ∨, ∀}` are unfolded one level at a time as
//! they are met. Internal subformulas are left as they are. Every proper
//! sub-result is simplified before it is used; the top-level result only gets
//! matrix cleanup, so the tuple shape produced by the last clause stays
//! visible.

use crate::formula::{expand_equality, is_internal, Formula};
use crate::fresh::NameSupply;
use crate::term::{Term, Var};
use crate::types::FiniteType;

use super::simplify::{cleanup_matrix, simplify_with};
use super::{read_normal_form, NormalForm, RewriteTrace, SstError};

/// Owns the fresh-name counter and the trace of one translation.
#[derive(Debug, Default)]
pub struct Session {
    pub names: NameSupply,
    pub trace: RewriteTrace,
}

impl Session {
    pub fn for_formula(f: &Formula) -> Self {
        let mut names = NameSupply::new();
        names.reserve(f.all_names());
        Session {
            names,
            trace: RewriteTrace::default(),
        }
    }
}

pub fn translate(f: &Formula) -> Result<(NormalForm, RewriteTrace), SstError> {
    let mut s = Session::for_formula(f);
    let nf = translate_session(f, &mut s)?;
    Ok((nf, s.trace))
}

pub fn translate_session(f: &Formula, s: &mut Session) -> Result<NormalForm, SstError> {
    tr(f, true, s)
}

fn tr(f: &Formula, top: bool, s: &mut Session) -> Result<NormalForm, SstError> {
    if is_internal(f) {
        let nf = NormalForm::raw(Vec::new(), Vec::new(), f.clone());
        s.trace.push("atomic", f.clone(), nf.render());
        return Ok(nf);
    }
    let (rule, raw) = match f {
        Formula::St(ty, z) => {
            let x = Var::new(s.names.fresh("w"), ty.clone());
            let m = expand_equality(&x.term(), z, ty, false, &mut s.names);
            ("st", NormalForm::raw(Vec::new(), vec![x], m))
        }
        Formula::Not(a) => {
            let inner = tr(a, false, s)?;
            ("negation", negate(&inner, &mut s.names))
        }
        Formula::Or(a, b) => {
            let l = tr(a, false, s)?;
            let r = tr(b, false, s)?;
            ("disjunction", disjoin(l, r, false))
        }
        Formula::Forall(z, a) => {
            let inner = tr(a, false, s)?;
            ("forall", generalise(z, &inner, &mut s.names))
        }
        Formula::Implies(a, b) => {
            let unfolded = Formula::or(Formula::not((**a).clone()), (**b).clone());
            s.trace.push("desugar", f.clone(), unfolded);
            let l = tr(&Formula::not((**a).clone()), false, s)?;
            let r = tr(b, false, s)?;
            ("disjunction", disjoin(l, r, true))
        }
        _ => {
            let g = unfold(f).expect("every external non-primitive node unfolds");
            s.trace.push("desugar", f.clone(), g.clone());
            return tr(&g, top, s);
        }
    };
    s.trace.push(rule, f.clone(), raw.render());
    if top {
        cleanup_matrix(&raw, &mut s.names, &mut s.trace)
    } else {
        simplify_with(&raw, &mut s.names, &mut s.trace, false)
    }
}

/// `¬(x̲; y̲; φ) = (Y̲; x̲; (∀y̲ ∈ Y̲[x̲])¬φ)` with `Yⱼ : x̲-types → yⱼ-type*`.
fn negate(nf: &NormalForm, names: &mut NameSupply) -> NormalForm {
    let xs = nf.univ.vars().to_vec();
    let arg_types: Vec<FiniteType> = xs.iter().map(|x| x.ty.clone()).collect();
    let ys = nf.exist.vars();
    let bigs: Vec<Var> = ys
        .iter()
        .map(|y| {
            let ty = FiniteType::curried(arg_types.clone(), FiniteType::seq(y.ty.clone()));
            Var::new(names.fresh(&capitalise(&y.name)), ty)
        })
        .collect();
    let mut m = Formula::not(nf.matrix.clone());
    for (y, big) in ys.iter().zip(&bigs).rev() {
        let bound = Term::apps(big.term(), xs.iter().map(Var::term));
        m = Formula::forall_in(y.clone(), bound, m);
    }
    NormalForm::raw(bigs, xs, m)
}

fn capitalise(name: &str) -> String {
    let mut cs = name.chars();
    match cs.next() {
        Some(c) if c.is_lowercase() => c.to_uppercase().chain(cs).collect(),
        Some(c) => std::iter::once(c).chain(cs).collect(),
        None => "Y".into(),
    }
}

/// Concatenates the tuples. An unfolded implication keeps its arrow.
fn disjoin(l: NormalForm, r: NormalForm, implication: bool) -> NormalForm {
    let mut univ = l.univ.into_vars();
    univ.extend(r.univ.into_vars());
    let mut exist = l.exist.into_vars();
    exist.extend(r.exist.into_vars());
    let m = match (l.matrix, implication) {
        (Formula::Not(a), true) => Formula::implies(*a, r.matrix),
        (lm, _) => Formula::or(lm, r.matrix),
    };
    NormalForm::raw(univ, exist, m)
}

/// `∀z(x̲; y̲; φ) = (x̲; Y̲; ∀z (∃y̲ ∈ Y̲)φ)` with `Yⱼ : yⱼ-type*`.
fn generalise(z: &Var, nf: &NormalForm, names: &mut NameSupply) -> NormalForm {
    let ys = nf.exist.vars();
    let seqs: Vec<Var> = ys
        .iter()
        .map(|y| Var::new(names.fresh(&y.name), FiniteType::seq(y.ty.clone())))
        .collect();
    let mut m = nf.matrix.clone();
    for (y, seq) in ys.iter().zip(&seqs).rev() {
        m = Formula::exists_in(y.clone(), seq.term(), m);
    }
    NormalForm::raw(nf.univ.vars().to_vec(), seqs, Formula::forall(z.clone(), m))
}

/// One-level unfolding of a connective outside the primitive set.
fn unfold(f: &Formula) -> Option<Formula> {
    let st_of = |x: &Var| Formula::St(x.ty.clone(), x.term());
    Some(match f {
        Formula::And(a, b) => Formula::not(Formula::or(
            Formula::not((**a).clone()),
            Formula::not((**b).clone()),
        )),
        Formula::Implies(a, b) => Formula::or(Formula::not((**a).clone()), (**b).clone()),
        Formula::Exists(x, a) => {
            Formula::not(Formula::forall(x.clone(), Formula::not((**a).clone())))
        }
        Formula::ForallSt(x, a) => Formula::forall(
            x.clone(),
            Formula::or(Formula::not(st_of(x)), (**a).clone()),
        ),
        Formula::ExistsSt(x, a) => Formula::not(Formula::forall(
            x.clone(),
            Formula::or(Formula::not(st_of(x)), Formula::not((**a).clone())),
        )),
        Formula::BForall(n, t, a) => Formula::forall(
            n.clone(),
            Formula::implies(Formula::le(n.term(), t.clone()), (**a).clone()),
        ),
        Formula::BExists(n, t, a) => Formula::exists(
            n.clone(),
            Formula::and(Formula::le(n.term(), t.clone()), (**a).clone()),
        ),
        _ => return None,
    })
}

/// Rewrites every connective into `{¬, ∨, ∀}` over atoms, `st`, bounded
/// number quantifiers and membership.
pub fn desugar_classical(f: &Formula) -> Formula {
    match f {
        Formula::AtomEq0(..) | Formula::St(..) | Formula::MemSeq(..) => f.clone(),
        Formula::Not(a) => Formula::not(desugar_classical(a)),
        Formula::Or(a, b) => Formula::or(desugar_classical(a), desugar_classical(b)),
        Formula::Forall(x, a) => Formula::forall(x.clone(), desugar_classical(a)),
        Formula::BForall(n, t, a) => Formula::bforall(n.clone(), t.clone(), desugar_classical(a)),
        Formula::BExists(n, t, a) => Formula::bexists(n.clone(), t.clone(), desugar_classical(a)),
        _ => desugar_classical(&unfold(f).expect("non-primitive connective")),
    }
}

/// For every negation step, the fresh functionals have the types computed
/// from the operand's tuples.
pub fn check_negation_types(trace: &RewriteTrace) -> Result<usize, String> {
    let mut checked = 0;
    for step in trace.steps.iter().filter(|s| s.rule == "negation") {
        let Formula::Not(a) = &step.before else {
            return Err(format!("negation step on {}", step.before));
        };
        let mut s = Session::for_formula(a);
        let operand = tr(a, false, &mut s).map_err(|e| e.to_string())?;
        let out = read_normal_form(&step.after).map_err(|e| e.to_string())?;
        let xs = operand.univ.types();
        let want: Vec<FiniteType> = operand
            .exist
            .vars()
            .iter()
            .map(|y| FiniteType::curried(xs.clone(), FiniteType::seq(y.ty.clone())))
            .collect();
        if out.univ.types() != want || out.exist.types() != xs {
            return Err(format!(
                "negation of {a}: functionals typed {:?}, expected {:?}",
                out.univ.types(),
                want
            ));
        }
        checked += 1;
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{all_quantifiers_standard, alpha_equal};
    use crate::sst::simplify::simplify;
    use crate::syntax::{parse_formula, Signature};

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare_const(
            "psi0",
            FiniteType::curried(vec![FiniteType::Nat; 3], FiniteType::Nat),
        );
        s.declare_var("y", FiniteType::Nat);
        s.declare_var("a", FiniteType::Nat);
        s.declare_var("f", FiniteType::one());
        s.declare_var("n", FiniteType::Nat);
        s
    }

    fn p(src: &str) -> Formula {
        parse_formula(src, &sig()).unwrap()
    }

    #[test]
    fn st_gives_existential_witness() {
        let (nf, _) = translate(&p("st(y)")).unwrap();
        assert!(alpha_equal(&nf.render(), &p("exists^st x:0. x = y")));
    }

    #[test]
    fn internal_atoms_are_fixed() {
        let f = p("f n = 0");
        let (nf, tr) = translate(&f).unwrap();
        assert_eq!(nf.render(), f);
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.steps[0].rule, "atomic");
    }

    #[test]
    fn negated_st_simplifies_to_universal() {
        let (nf, _) = translate(&p("~st(y)")).unwrap();
        let (nf, _) = simplify(&nf).unwrap();
        assert!(alpha_equal(&nf.render(), &p("forall^st w:0. w != y")));
    }

    #[test]
    fn raw_negation_has_functional_shape() {
        // ¬(∃st x)(x = y) before any simplification
        let nf = NormalForm::raw(
            Vec::new(),
            vec![Var::nat("x")],
            p("forall x:0. x = y").children()[0].clone(),
        );
        let mut names = NameSupply::new();
        names.reserve(["x", "y"]);
        let neg = negate(&nf, &mut names);
        assert_eq!(neg.univ.types(), vec![FiniteType::seq(FiniteType::Nat)]);
        assert!(neg.exist.is_empty());
        let nf = NormalForm::raw(
            vec![Var::nat("u")],
            vec![Var::new("v", FiniteType::one())],
            p("y = y"),
        );
        let neg = negate(&nf, &mut names);
        assert_eq!(
            neg.univ.types(),
            vec![FiniteType::arrow(
                FiniteType::Nat,
                FiniteType::seq(FiniteType::one())
            )]
        );
        assert_eq!(neg.exist.names().collect::<Vec<_>>(), ["u"]);
    }

    #[test]
    fn matrices_are_internal_and_traces_replay() {
        for src in [
            "forall^st x:0. exists^st z:0. psi0 x z a = 0",
            "exists^st z:0. psi0 z z a = 0",
            "st(y) /\\ ~st(a)",
            "forall x:0. st(x) -> exists^st z:0. psi0 x z a = 0",
            "(forall^st z:0. psi0 z z a = 0) -> exists^st u:1. u 0 = a",
            "forall n <= a. exists^st z:0. psi0 n z a = 0",
            "exists^st g:1. forall^st k:0. g k = f k",
        ] {
            let f = p(src);
            let (nf, trace) = translate(&f).unwrap();
            assert!(is_internal(&nf.matrix), "{src}");
            trace
                .replay(&nf.render())
                .unwrap_or_else(|e| panic!("{src}: {e}"));
            check_negation_types(&trace).unwrap();
        }
    }

    #[test]
    fn desugaring_uses_primitive_connectives() {
        let d = desugar_classical(&p(
            "(exists^st z:0. psi0 z z a = 0) -> forall^st u:0. exists v:0. u = v /\\ v = y",
        ));
        fn primitive(f: &Formula) -> bool {
            matches!(
                f,
                Formula::AtomEq0(..)
                    | Formula::St(..)
                    | Formula::MemSeq(..)
                    | Formula::Not(_)
                    | Formula::Or(..)
                    | Formula::Forall(..)
                    | Formula::BForall(..)
                    | Formula::BExists(..)
            ) && f.children().into_iter().all(primitive)
        }
        assert!(primitive(&d));
        assert!(!all_quantifiers_standard(&d));
        let g = p("f n = 0");
        assert_eq!(desugar_classical(&g), g);
    }
}
