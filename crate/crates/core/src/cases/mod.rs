//! Executable finite-depth counterparts of the effective equivalences:
//! bounded sequences and trees, path and mu functionals, the fan bound,
//! and the exhaustive suites that check them against brute force.

mod fan;
mod report;
mod seq;
mod tree;
mod uwkl;

use thiserror::Error;

pub use fan::{depth_bar, fan_bound_bruteforce};
pub use report::{
    demo, demo_names, ext_suite, fan_suite, mu_from_uwkl_suite, path_suite, random_ext_suite,
    random_path_suite, Report,
};
pub use seq::{mu_bruteforce, BoundedSeq};
pub use tree::{FinTree, PathPrefix, MAX_DEPTH};
pub use uwkl::{
    bounded_mu, build_pair_trees, check_ext_functional, grilliot_extract, leftmost_path,
    leftmost_phi, make_xi_leftmost, make_xi_tight, mu_from_uwkl, ExtReport, ExtViolation,
    ModulusFn, MuOracle, PathFn, UwklFunctional,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("a bounded sequence needs at least one value")]
    EmptySequence,
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("tree has no node of full length")]
    NotDeep,
    #[error("contract violated: {0}")]
    ContractViolation(String),
    #[error("branch {branch} stays in the tree up to its claimed bar {claimed}")]
    BarViolated { branch: String, claimed: usize },
    #[error("unknown demo `{0}`")]
    UnknownDemo(String),
}
