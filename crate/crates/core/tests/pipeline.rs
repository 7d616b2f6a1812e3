use nsf_core::cases::{
    build_pair_trees, depth_bar, fan_bound_bruteforce, grilliot_extract, make_xi_leftmost,
    mu_bruteforce, BoundedSeq, CaseError, FinTree, UwklFunctional,
};
use nsf_core::corpus::{builtin, parse_file, CorpusFile};
use nsf_core::formula::{alpha_equal, Formula};
use nsf_core::herbrand::{extraction_obligation, implication_to_normal_form};
use nsf_core::sst::{fixed_point_check, read_normal_form, translate, NormalForm};
use nsf_core::syntax::{parse_formula, parse_type};

fn corpus(name: &str) -> CorpusFile {
    let file = format!("{name}.nsf");
    parse_file(&file, builtin(&file).unwrap()).unwrap()
}

fn nf_of(file: &CorpusFile, name: &str) -> NormalForm {
    read_normal_form(file.get(name).unwrap().formula().unwrap()).unwrap()
}

const MU_ANTECEDENT: &str = "\
const lh : 0 -> 0
var mu : 2
var T : 1
nf mu_ante := forall f:1. (exists x:0. f x = 0) -> f (mu f) = 0
nf path := forall^st T:1. forall^st l:0. exists^st a:0. \
((forall x:0. T x <= 1) /\\ (forall k:0. exists b:0. lh b = k /\\ T b = 0)) -> (lh a = l /\\ T a = 0)
";

#[test]
fn bruteforce_mu_returns_the_least_zero_or_zero() {
    let f = BoundedSeq::new(vec![1, 1, 0, 1]).unwrap();
    assert_eq!(mu_bruteforce(&f, 10), 2);
    assert_eq!(mu_bruteforce(&BoundedSeq::new(vec![1]).unwrap(), 10), 0);
    assert_eq!(mu_bruteforce(&BoundedSeq::new(vec![0]).unwrap(), 10), 0);
}

#[test]
fn depth_zero_pair_trees_are_the_root() {
    let f = BoundedSeq::new(vec![0]).unwrap();
    let (t0, t1) = build_pair_trees(&f, 0).unwrap();
    assert_eq!(t0, t1);
    assert_eq!(t0, FinTree::parse(0, "ε").unwrap());
}

#[test]
fn the_modulus_bounds_the_first_zero() {
    let f = BoundedSeq::new(vec![1, 1, 0]).unwrap();
    let n = grilliot_extract(&UwklFunctional::leftmost(8), &f, 8).unwrap();
    assert!(n >= 2);
    let t = FinTree::full(4).unwrap();
    assert_eq!(make_xi_leftmost(4)(&t, &t, 1), 5);
}

#[test]
fn internal_formulas_translate_to_themselves() {
    let file = corpus("axioms");
    let f = file.get("internal_atom").unwrap().formula().unwrap();
    let (nf, _) = translate(f).unwrap();
    assert!(alpha_equal(&nf.render(), f));
    let kurve = corpus("uwkl_plus");
    assert!(fixed_point_check(kurve.get("kurve").unwrap().formula().unwrap()).unwrap());
}

#[test]
fn a_vacuous_antecedent_leaves_the_consequent() {
    let file = corpus("pi01_trans");
    let cons = nf_of(&file, "pi01_trans_nf");
    let empty = NormalForm::internal(Formula::top()).unwrap();
    let folded = implication_to_normal_form(&empty, &cons, false).unwrap();
    assert_eq!(folded, cons);
}

#[test]
fn the_standard_transfer_obligation_asks_for_a_finite_search_list() {
    let file = corpus("pi01_trans");
    let nf = nf_of(&file, "pi01_trans_nf");
    let ob = extraction_obligation(&nf, "t");
    assert!(ob.to_string().starts_with("forall f:1. exists n:0 in t f."), "{ob}");
}

#[test]
fn without_existentials_the_obligation_is_the_bare_matrix() {
    let file = corpus("axioms");
    let f = file.get("internal_atom").unwrap().formula().unwrap();
    let nf = read_normal_form(f).unwrap();
    let ob = extraction_obligation(&nf, "t");
    assert!(ob.holes.is_empty());
    assert!(alpha_equal(&ob.to_formula(), f));
}

#[test]
fn a_functional_antecedent_becomes_an_argument_of_the_hole() {
    let file = parse_file("mu_path.nsf", MU_ANTECEDENT).unwrap();
    let ante = nf_of(&file, "mu_ante");
    let cons = nf_of(&file, "path");
    let folded = implication_to_normal_form(&ante, &cons, false).unwrap();
    let ob = extraction_obligation(&folded, "t");
    let want = parse_formula(
        "forall mu:2, T:1, l:0. exists a:0 in t mu T l. \
         (forall f:1. (exists x:0. f x = 0) -> f (mu f) = 0) -> \
         (forall x:0. T x <= 1) /\\ (forall k:0. exists b:0. lh b = k /\\ T b = 0) -> \
         lh a = l /\\ T a = 0",
        &{
            let mut sig = file.sig.clone();
            sig.declare_var("t", parse_type("2 -> 1 -> 0 -> 0*").unwrap());
            sig
        },
    )
    .unwrap();
    assert!(alpha_equal(&ob.to_formula(), &want), "{ob}");
}

#[test]
fn fan_bounds_on_small_trees() {
    let root = FinTree::parse(3, "ε").unwrap();
    assert_eq!(fan_bound_bruteforce(&root, &depth_bar(&root)), Ok(1));
    let deep = FinTree::full(3).unwrap();
    assert!(matches!(
        fan_bound_bruteforce(&deep, &depth_bar(&deep)),
        Err(CaseError::BarViolated { .. })
    ));
    let cut = FinTree::parse(4, "ε 0 1 00 01 10").unwrap();
    assert_eq!(fan_bound_bruteforce(&cut, &|_| 3), Ok(3));
}
