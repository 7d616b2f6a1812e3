//! Weak König's lemma, uniformly: a path functional, its extensionality
//! modulus, and the two directions of its equivalence with the mu-operator.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::seq::{mu_bruteforce, BoundedSeq};
use super::tree::{FinTree, PathPrefix};
use super::CaseError;

pub type PathFn = Arc<dyn Fn(&FinTree) -> PathPrefix + Send + Sync>;
pub type ModulusFn = Arc<dyn Fn(&FinTree, &FinTree, usize) -> usize + Send + Sync>;
pub type MuOracle<'a> = &'a dyn Fn(&BoundedSeq) -> u64;

/// The pair `T₀, T₁`: `T_i` holds the constant-`i` strings, and the
/// constant-`(1-i)` strings `σ` for which `f` has no zero below `|σ|`.
///
/// The trees agree on all strings up to the first zero of `f` and differ
/// just above it; without a zero below the depth they coincide.
pub fn build_pair_trees(f: &BoundedSeq, depth: usize) -> Result<(FinTree, FinTree), CaseError> {
    let zero = f.first_zero(depth as u64);
    let mut pair = [FinTree::empty(depth)?, FinTree::empty(depth)?];
    for (i, t) in pair.iter_mut().enumerate() {
        let own = i == 1;
        t.insert(&vec![own; depth]);
        let reach = zero.map_or(depth, |z| (z as usize).min(depth));
        t.insert(&vec![!own; reach]);
    }
    let [t0, t1] = pair;
    Ok((t0, t1))
}

/// Whether `T` has a full-length node extending `prefix`, answered by one
/// mu query on the 0/1 sequence listing those candidates in order.
fn extends_deep(mu: MuOracle<'_>, t: &FinTree, prefix: &[bool]) -> bool {
    let d = t.depth();
    let free = d - prefix.len();
    let base = prefix
        .iter()
        .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
        << free;
    let values = (0..1u64 << free)
        .map(|j| u64::from(!t.contains_code(d, base + j)))
        .collect();
    let g = BoundedSeq::new(values).expect("at least one candidate");
    g.get(mu(&g)) == 0
}

/// The leftmost full-length path through `T`, chosen bit by bit: go left
/// whenever the left child still reaches full depth.
pub fn leftmost_path(mu: MuOracle<'_>, t: &FinTree) -> Result<PathPrefix, CaseError> {
    if !extends_deep(mu, t, &[]) {
        return Err(CaseError::NotDeep);
    }
    let mut bits = Vec::with_capacity(t.depth());
    for _ in 0..t.depth() {
        let mut left = bits.clone();
        left.push(false);
        let go_left = extends_deep(mu, t, &left);
        bits.push(!go_left);
    }
    Ok(PathPrefix::new(bits))
}

/// The oracle used by the harness: exhaustive search over the known values.
pub fn bounded_mu(g: &BoundedSeq) -> u64 {
    mu_bruteforce(g, g.len() as u64)
}

/// A path functional with an extensionality modulus. The modulus contract:
/// if `T` and `S` agree on all strings shorter than `xi(T, S, k)`, then
/// `phi(T)` and `phi(S)` agree on their first `k` bits.
#[derive(Clone)]
pub struct UwklFunctional {
    pub name: String,
    pub phi: PathFn,
    pub xi: ModulusFn,
}

impl fmt::Debug for UwklFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UwklFunctional")
            .field("name", &self.name)
            .finish()
    }
}

/// Leftmost path via the bounded mu oracle; the all-zero string on trees
/// without a full-length node, where any output is allowed.
pub fn leftmost_phi(t: &FinTree) -> PathPrefix {
    leftmost_path(&bounded_mu, t).unwrap_or_else(|_| PathPrefix::zeros(t.depth()))
}

/// The constant modulus `D + 1`: trees agreeing on every string of length
/// at most `D` are equal, so any functional respects it.
pub fn make_xi_leftmost(depth: usize) -> ModulusFn {
    Arc::new(move |_, _, _| depth + 1)
}

/// The least modulus for `phi`: 0 when the outputs already agree on `k`
/// bits, otherwise one past the first level where the trees differ.
pub fn make_xi_tight(phi: PathFn) -> ModulusFn {
    Arc::new(move |t, s, k| {
        if phi(t).prefix(k) == phi(s).prefix(k) {
            0
        } else {
            t.first_difference(s).map_or(0, |l| l + 1)
        }
    })
}

impl UwklFunctional {
    pub fn new(name: impl Into<String>, phi: PathFn, xi: ModulusFn) -> Self {
        UwklFunctional {
            name: name.into(),
            phi,
            xi,
        }
    }

    pub fn leftmost(depth: usize) -> Self {
        UwklFunctional::new("leftmost", Arc::new(leftmost_phi), make_xi_leftmost(depth))
    }

    pub fn leftmost_tight() -> Self {
        let phi: PathFn = Arc::new(leftmost_phi);
        UwklFunctional::new("leftmost-tight", phi.clone(), make_xi_tight(phi))
    }

    /// `phi(T)`, checked to be a full path whenever `T` is deep.
    pub fn path(&self, t: &FinTree) -> Result<PathPrefix, CaseError> {
        let p = (self.phi)(t);
        if t.is_deep() && (p.len() != t.depth() || !t.has_path(&p)) {
            return Err(CaseError::ContractViolation(format!(
                "{} returned {p}, not a path through {t}",
                self.name
            )));
        }
        Ok(p)
    }
}

/// Grilliot's trick at finite depth: the modulus at the discontinuity pair
/// bounds the first zero of `f`.
///
/// If `f` has a zero below the depth, `phi(T₀)` and `phi(T₁)` differ at
/// their first bit, so the trees cannot agree below the returned `N`; they
/// only differ above the first zero, hence that zero is at most `N`.
pub fn grilliot_extract(
    u: &UwklFunctional,
    f: &BoundedSeq,
    depth: usize,
) -> Result<u64, CaseError> {
    let (t0, t1) = build_pair_trees(f, depth)?;
    u.path(&t0)?;
    u.path(&t1)?;
    Ok((u.xi)(&t0, &t1, 1) as u64)
}

/// `mu(f)` computed from a path functional and its modulus.
pub fn mu_from_uwkl(u: &UwklFunctional, f: &BoundedSeq, depth: usize) -> Result<u64, CaseError> {
    let n = grilliot_extract(u, f, depth)?;
    Ok(mu_bruteforce(f, n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtViolation {
    pub left: String,
    pub right: String,
    pub k: usize,
    pub modulus: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExtReport {
    pub instances: usize,
    pub violations: Vec<ExtViolation>,
}

/// Tests the modulus contract on each sample.
pub fn check_ext_functional<'a>(
    u: &UwklFunctional,
    samples: impl IntoIterator<Item = (&'a FinTree, &'a FinTree, usize)>,
) -> ExtReport {
    let mut report = ExtReport::default();
    for (t, s, k) in samples {
        report.instances += 1;
        let n = (u.xi)(t, s, k);
        if t.agrees_below(s, n) && (u.phi)(t).prefix(k) != (u.phi)(s).prefix(k) {
            report.violations.push(ExtViolation {
                left: t.to_string(),
                right: s.to_string(),
                k,
                modulus: n,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> BoundedSeq {
        BoundedSeq::new(v.to_vec()).unwrap()
    }

    fn path(s: &str) -> PathPrefix {
        PathPrefix::parse(s).unwrap()
    }

    #[test]
    fn pair_trees_without_zero_coincide() {
        let (t0, t1) = build_pair_trees(&seq(&[1, 1, 1]), 5).unwrap();
        assert_eq!(t0, t1);
        assert!(t0.is_deep());
        assert_eq!(t0.node_count(), 11);
        let (r0, r1) = build_pair_trees(&seq(&[1]), 0).unwrap();
        assert_eq!(r0.node_count(), 1);
        assert_eq!(r0, r1);
    }

    #[test]
    fn pair_trees_split_above_the_first_zero() {
        let (t0, t1) = build_pair_trees(&seq(&[1, 1, 0]), 6).unwrap();
        assert_eq!(t0.least_deep_branch(), Some(path("000000")));
        assert_eq!(t1.least_deep_branch(), Some(path("111111")));
        assert!(!t0.contains(&[true; 6]));
        assert!(t0.agrees_below(&t1, 3));
        assert_eq!(t0.first_difference(&t1), Some(3));
    }

    #[test]
    fn leftmost_examples() {
        let full = FinTree::full(4).unwrap();
        assert_eq!(leftmost_path(&bounded_mu, &full).unwrap(), path("0000"));
        let (_, t1) = build_pair_trees(&seq(&[1, 1, 0]), 6).unwrap();
        assert_eq!(leftmost_path(&bounded_mu, &t1).unwrap(), path("111111"));
        let cut = FinTree::parse(4, "ε 0 00 000 1 10 100 1000").unwrap();
        assert_eq!(leftmost_path(&bounded_mu, &cut).unwrap(), path("1000"));
        let shallow = FinTree::parse(4, "ε 0 00").unwrap();
        assert_eq!(
            leftmost_path(&bounded_mu, &shallow),
            Err(CaseError::NotDeep)
        );
        assert_eq!(
            leftmost_path(&bounded_mu, &FinTree::empty(2).unwrap()),
            Err(CaseError::NotDeep)
        );
    }

    #[test]
    fn grilliot_examples() {
        let u = UwklFunctional::leftmost(8);
        let f = seq(&[1, 1, 0]);
        let n = grilliot_extract(&u, &f, 8).unwrap();
        assert!(n >= 2);
        assert_eq!(mu_bruteforce(&f, n), 2);
        assert_eq!(mu_from_uwkl(&u, &seq(&[1, 0]), 8).unwrap(), 1);
        assert_eq!(mu_from_uwkl(&u, &seq(&[1]), 8).unwrap(), 0);
        assert_eq!(mu_from_uwkl(&u, &seq(&[0, 0]), 8).unwrap(), 0);

        let tight = UwklFunctional::leftmost_tight();
        assert_eq!(grilliot_extract(&tight, &f, 8).unwrap(), 4);
        assert_eq!(mu_from_uwkl(&tight, &f, 8).unwrap(), 2);
        assert_eq!(grilliot_extract(&tight, &seq(&[1, 1]), 8).unwrap(), 0);
    }

    #[test]
    fn bad_functionals_are_reported() {
        let bogus = UwklFunctional::new(
            "ones",
            Arc::new(|t: &FinTree| PathPrefix::new(vec![true; t.depth()])),
            make_xi_leftmost(6),
        );
        let err = grilliot_extract(&bogus, &seq(&[1, 1, 0]), 6).unwrap_err();
        assert!(matches!(err, CaseError::ContractViolation(_)));

        // Without a modulus the discontinuity pair is a counterexample.
        let blind = UwklFunctional::new("leftmost", Arc::new(leftmost_phi), Arc::new(|_, _, _| 0));
        let (t0, t1) = build_pair_trees(&seq(&[1, 1, 0]), 6).unwrap();
        let report = check_ext_functional(&blind, [(&t0, &t1, 1)]);
        assert_eq!(report.violations.len(), 1);
        let report =
            check_ext_functional(&UwklFunctional::leftmost(6), [(&t0, &t1, 1), (&t0, &t0, 6)]);
        assert_eq!(report.instances, 2);
        assert!(report.violations.is_empty());
    }
}
