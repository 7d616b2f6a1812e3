use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fan::{depth_bar, fan_bound_bruteforce};
use super::seq::{mu_bruteforce, BoundedSeq};
use super::tree::FinTree;
use super::uwkl::{bounded_mu, check_ext_functional, leftmost_path, mu_from_uwkl, UwklFunctional};
use super::CaseError;

/// How many failing instances a report keeps verbatim.
const KEEP_FAILURES: usize = 10;

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub case: String,
    #[serde(rename = "D")]
    pub depth: usize,
    pub instances: usize,
    pub violations: usize,
    pub runtime_ms: u128,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl Report {
    fn start(case: impl Into<String>, depth: usize) -> (Self, Instant) {
        let r = Report {
            case: case.into(),
            depth,
            instances: 0,
            violations: 0,
            runtime_ms: 0,
            notes: Vec::new(),
            failures: Vec::new(),
        };
        (r, Instant::now())
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violations += 1;
            if self.failures.len() < KEEP_FAILURES {
                self.failures.push(describe());
            }
        }
    }

    fn finish(mut self, started: Instant) -> Self {
        self.runtime_ms = started.elapsed().as_millis();
        self
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: D={} {}/{} pass, {} violations",
            self.case,
            self.depth,
            self.instances - self.violations,
            self.instances,
            self.violations
        )?;
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        for fail in &self.failures {
            write!(f, "\n  FAIL {fail}")?;
        }
        Ok(())
    }
}

/// Every 0/1 sequence with `len` values against the brute-force mu at `depth`.
pub fn mu_from_uwkl_suite(u: &UwklFunctional, depth: usize, len: usize) -> Report {
    let (mut r, t) = Report::start(format!("mu-from-uwkl/{}", u.name), depth);
    r.notes.push(format!(
        "all {} binary sequences of length {len}, tail 1; tree pair cut above the first zero of f",
        1u64 << len
    ));
    for bits in 0..1u64 << len {
        let f = BoundedSeq::from_bits(bits, len).expect("len > 0");
        let want = mu_bruteforce(&f, depth as u64);
        let got = mu_from_uwkl(u, &f, depth);
        r.record(got.as_ref() == Ok(&want), || {
            format!("f={f}: got {got:?}, want {want}")
        });
    }
    r.finish(t)
}

fn check_path(r: &mut Report, tree: &FinTree) {
    let got = leftmost_path(&bounded_mu, tree);
    match tree.least_deep_branch() {
        Some(want) => {
            let ok = matches!(&got, Ok(p) if *p == want && tree.has_path(p));
            r.record(ok, || format!("T={tree}: got {got:?}, want {want}"));
        }
        None => r.record(got == Err(CaseError::NotDeep), || {
            format!("T={tree}: got {got:?}, want NotDeep")
        }),
    }
}

/// Leftmost path from the mu oracle against a direct scan, over every
/// prefix-closed tree of the given depth.
pub fn path_suite(depth: usize) -> Result<Report, CaseError> {
    let (mut r, t) = Report::start("uwkl-from-mu/exhaustive", depth);
    for tree in FinTree::enumerate(depth)? {
        check_path(&mut r, &tree);
    }
    Ok(r.finish(t))
}

/// As [`path_suite`] on seeded random trees, a quarter of them not deep.
pub fn random_path_suite(depth: usize, count: usize, seed: u64) -> Result<Report, CaseError> {
    let (mut r, t) = Report::start("uwkl-from-mu/random", depth);
    r.notes.push(format!("{count} random trees, seed {seed}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let tree = if i % 4 == 3 {
            FinTree::random(depth, 0.6, &mut rng)?
        } else {
            FinTree::random_deep(depth, 0.5, &mut rng)?
        };
        check_path(&mut r, &tree);
    }
    Ok(r.finish(t))
}

/// The modulus contract on every pair of depth-`depth` trees and every `k`.
pub fn ext_suite(u: &UwklFunctional, depth: usize) -> Result<Report, CaseError> {
    let (mut r, t) = Report::start(format!("ext/{}/exhaustive", u.name), depth);
    let trees = FinTree::enumerate(depth)?;
    for a in &trees {
        let samples = trees
            .iter()
            .flat_map(|b| (0..=depth).map(move |k| (a, b, k)));
        let rep = check_ext_functional(u, samples);
        r.instances += rep.instances;
        r.violations += rep.violations.len();
        for v in rep.violations {
            if r.failures.len() < KEEP_FAILURES {
                r.failures.push(format!("{v:?}"));
            }
        }
    }
    Ok(r.finish(t))
}

/// The modulus contract on seeded random pairs: a deep tree and a copy
/// perturbed above a random level.
pub fn random_ext_suite(
    u: &UwklFunctional,
    depth: usize,
    count: usize,
    seed: u64,
) -> Result<Report, CaseError> {
    let (mut r, t) = Report::start(format!("ext/{}/random", u.name), depth);
    r.notes.push(format!("{count} random pairs, seed {seed}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let a = FinTree::random_deep(depth, 0.6, &mut rng)?;
        let b = a.perturb(rng.gen_range(1..=depth.max(1)), &mut rng);
        let k = rng.gen_range(0..=depth);
        let rep = check_ext_functional(u, [(&a, &b, k)]);
        r.record(rep.violations.is_empty(), || {
            format!("{:?}", rep.violations)
        });
    }
    Ok(r.finish(t))
}

/// Fan bound with the bar `g ≡ D` over every tree of the given depth. A
/// deep tree must be rejected; otherwise the bound must be one past the
/// longest node.
pub fn fan_suite(depth: usize) -> Result<Report, CaseError> {
    let (mut r, t) = Report::start("fan/exhaustive", depth);
    let mut rejected = 0;
    for tree in FinTree::enumerate(depth)? {
        let got = fan_bound_bruteforce(&tree, &depth_bar(&tree));
        if tree.is_deep() {
            let ok = matches!(got, Err(CaseError::BarViolated { .. }));
            rejected += usize::from(ok);
            r.record(ok, || format!("T={tree}: deep tree accepted with {got:?}"));
        } else {
            let height = tree.nodes().map(|n| n.len() + 1).max().unwrap_or(0);
            r.record(got == Ok(height), || {
                format!("T={tree}: got {got:?}, want {height}")
            });
        }
    }
    r.notes
        .push(format!("BarViolated reported on all {rejected} deep trees"));
    Ok(r.finish(t))
}

pub fn demo_names() -> &'static [&'static str] {
    &["mu-from-uwkl", "uwkl-from-mu", "ext", "fan"]
}

/// Runs a named suite. Depths above 3 use seeded random samples where the
/// exhaustive version would not fit.
pub fn demo(name: &str, depth: usize) -> Result<Vec<Report>, CaseError> {
    let small = depth <= 3;
    Ok(match name {
        "mu-from-uwkl" => {
            let len = depth.max(2) - 1;
            vec![
                mu_from_uwkl_suite(&UwklFunctional::leftmost(depth), depth, len),
                mu_from_uwkl_suite(&UwklFunctional::leftmost_tight(), depth, len),
            ]
        }
        "uwkl-from-mu" if small => vec![path_suite(depth)?],
        "uwkl-from-mu" => vec![random_path_suite(depth, 1000, 0)?],
        "ext" if small => vec![
            ext_suite(&UwklFunctional::leftmost(depth), depth)?,
            ext_suite(&UwklFunctional::leftmost_tight(), depth)?,
        ],
        "ext" => vec![
            random_ext_suite(&UwklFunctional::leftmost(depth), depth, 1000, 0)?,
            random_ext_suite(&UwklFunctional::leftmost_tight(), depth, 1000, 0)?,
        ],
        "fan" if small => vec![fan_suite(depth)?],
        "fan" => {
            let (mut r, t) = Report::start("fan/full-tree", depth);
            let full = FinTree::full(depth)?;
            let got = fan_bound_bruteforce(&full, &depth_bar(&full));
            let ok = matches!(got, Err(CaseError::BarViolated { .. }));
            r.record(ok, || format!("full tree accepted with {got:?}"));
            if let Err(e) = got {
                r.notes.push(e.to_string());
            }
            vec![r.finish(t)]
        }
        other => return Err(CaseError::UnknownDemo(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for name in demo_names() {
            for r in demo(name, 2).unwrap() {
                assert!(r.passed(), "{r}");
                assert!(r.instances > 0);
            }
        }
        assert!(matches!(demo("nope", 3), Err(CaseError::UnknownDemo(_))));
    }

    #[test]
    fn report_serialises_documented_fields() {
        let r = path_suite(1).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["case", "D", "instances", "violations", "runtime_ms"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["instances"], 5);
    }
}
