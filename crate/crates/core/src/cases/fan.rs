use super::tree::{FinTree, PathPrefix};
use super::CaseError;

/// Length of the shortest prefix of `branch` outside `T`.
fn exit_level(t: &FinTree, branch: &PathPrefix) -> Option<usize> {
    (0..=branch.len()).find(|&l| !t.contains(&branch.bits[..l]))
}

/// The uniform bar bound: the least `k` by which every branch has left `T`.
///
/// Every full-length branch `β` must satisfy `β̄g(β) ∉ T` with
/// `g(β) ≤ depth`; otherwise the bar condition fails and is reported.
pub fn fan_bound_bruteforce(
    t: &FinTree,
    g: &dyn Fn(&PathPrefix) -> usize,
) -> Result<usize, CaseError> {
    let d = t.depth();
    let mut bound = 0;
    for code in 0..1u64 << d {
        let beta = PathPrefix::from_code(d, code);
        let claimed = g(&beta);
        if claimed > d || t.contains(&beta.bits[..claimed]) {
            return Err(CaseError::BarViolated {
                branch: beta.to_string(),
                claimed,
            });
        }
        let exit = exit_level(t, &beta).expect("the claimed prefix is outside");
        bound = bound.max(exit);
    }
    Ok(bound)
}

/// The bar `g(β) = D` when it is one, which holds exactly when no
/// full-length string is in `T`.
pub fn depth_bar(t: &FinTree) -> impl Fn(&PathPrefix) -> usize + '_ {
    move |_| t.depth()
}
