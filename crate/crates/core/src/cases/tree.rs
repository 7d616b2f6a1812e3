use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::CaseError;

/// Deepest tree the harness will allocate; level `ℓ` takes `2^ℓ` slots.
pub const MAX_DEPTH: usize = 24;

/// A finite binary string, first bit first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct PathPrefix {
    pub bits: Vec<bool>,
}

impl PathPrefix {
    pub fn new(bits: Vec<bool>) -> Self {
        PathPrefix { bits }
    }

    pub fn zeros(len: usize) -> Self {
        PathPrefix::new(vec![false; len])
    }

    /// The `len`-bit string whose binary value is `code`.
    pub fn from_code(len: usize, code: u64) -> Self {
        PathPrefix::new((0..len).map(|i| (code >> (len - 1 - i)) & 1 == 1).collect())
    }

    pub fn parse(s: &str) -> Result<Self, CaseError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CaseError::InvalidTree(format!("not a bit string: {s}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(PathPrefix::new)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn code(&self) -> u64 {
        code_of(&self.bits)
    }

    /// The first `k` bits (all of them when shorter).
    pub fn prefix(&self, k: usize) -> &[bool] {
        &self.bits[..k.min(self.bits.len())]
    }
}

impl fmt::Display for PathPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return write!(f, "ε");
        }
        for &b in &self.bits {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

fn code_of(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

/// A prefix-closed set of binary strings of length at most `depth`.
///
/// The empty set is allowed; any non-empty tree contains the empty string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinTree {
    depth: usize,
    levels: Vec<Vec<bool>>,
}

impl FinTree {
    pub fn empty(depth: usize) -> Result<Self, CaseError> {
        if depth > MAX_DEPTH {
            return Err(CaseError::InvalidTree(format!(
                "depth {depth} exceeds the limit {MAX_DEPTH}"
            )));
        }
        Ok(FinTree {
            depth,
            levels: (0..=depth).map(|l| vec![false; 1 << l]).collect(),
        })
    }

    /// All strings of length at most `depth`.
    pub fn full(depth: usize) -> Result<Self, CaseError> {
        let mut t = FinTree::empty(depth)?;
        for level in &mut t.levels {
            level.fill(true);
        }
        Ok(t)
    }

    /// Builds a tree from explicit nodes, checking prefix closure.
    pub fn from_nodes<'a>(
        depth: usize,
        nodes: impl IntoIterator<Item = &'a PathPrefix>,
    ) -> Result<Self, CaseError> {
        let mut t = FinTree::empty(depth)?;
        for n in nodes {
            if n.len() > depth {
                return Err(CaseError::InvalidTree(format!(
                    "node {n} is deeper than {depth}"
                )));
            }
            t.levels[n.len()][n.code() as usize] = true;
        }
        t.check_closed()?;
        Ok(t)
    }

    /// Parses whitespace-separated bit strings, `ε` or `-` for the root.
    pub fn parse(depth: usize, src: &str) -> Result<Self, CaseError> {
        let nodes = src
            .split_whitespace()
            .map(|w| match w {
                "ε" | "-" => Ok(PathPrefix::default()),
                _ => PathPrefix::parse(w),
            })
            .collect::<Result<Vec<_>, _>>()?;
        FinTree::from_nodes(depth, &nodes)
    }

    fn check_closed(&self) -> Result<(), CaseError> {
        for l in 1..=self.depth {
            for (c, &here) in self.levels[l].iter().enumerate() {
                if here && !self.levels[l - 1][c >> 1] {
                    return Err(CaseError::InvalidTree(format!(
                        "node {} has no parent",
                        PathPrefix::from_code(l, c as u64)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn contains_code(&self, len: usize, code: u64) -> bool {
        len <= self.depth
            && self.levels[len]
                .get(code as usize)
                .copied()
                .unwrap_or(false)
    }

    pub fn contains(&self, bits: &[bool]) -> bool {
        self.contains_code(bits.len(), code_of(bits))
    }

    /// Adds a node and all its prefixes.
    pub fn insert(&mut self, bits: &[bool]) {
        for l in 0..=bits.len().min(self.depth) {
            self.levels[l][code_of(&bits[..l]) as usize] = true;
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.levels[0][0]
    }

    pub fn level_nonempty(&self, len: usize) -> bool {
        len <= self.depth && self.levels[len].iter().any(|&b| b)
    }

    /// Has a node at every length up to the depth.
    pub fn is_deep(&self) -> bool {
        self.level_nonempty(self.depth)
    }

    pub fn nodes(&self) -> impl Iterator<Item = PathPrefix> + '_ {
        self.levels.iter().enumerate().flat_map(|(l, level)| {
            level
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(move |(c, _)| PathPrefix::from_code(l, c as u64))
        })
    }

    pub fn node_count(&self) -> usize {
        self.levels
            .iter()
            .map(|l| l.iter().filter(|&&b| b).count())
            .sum()
    }

    /// Agreement on every string of length `< len`.
    pub fn agrees_below(&self, other: &FinTree, len: usize) -> bool {
        let top = len.min(self.depth.max(other.depth) + 1);
        (0..top)
            .all(|l| (0..1u64 << l).all(|c| self.contains_code(l, c) == other.contains_code(l, c)))
    }

    /// Length of the shortest string on which the trees differ.
    pub fn first_difference(&self, other: &FinTree) -> Option<usize> {
        (0..=self.depth.max(other.depth)).find(|&l| {
            (0..1u64 << l).any(|c| self.contains_code(l, c) != other.contains_code(l, c))
        })
    }

    /// The lexicographically least node of full length, by a direct scan.
    pub fn least_deep_branch(&self) -> Option<PathPrefix> {
        self.levels[self.depth]
            .iter()
            .position(|&b| b)
            .map(|c| PathPrefix::from_code(self.depth, c as u64))
    }

    /// Whether every prefix of `p` is a node.
    pub fn has_path(&self, p: &PathPrefix) -> bool {
        (0..=p.len()).all(|l| self.contains(&p.bits[..l]))
    }

    /// Every prefix-closed tree of the given depth, the empty one first.
    pub fn enumerate(depth: usize) -> Result<Vec<FinTree>, CaseError> {
        if depth > 3 {
            return Err(CaseError::InvalidTree(format!(
                "exhaustive enumeration is limited to depth 3, got {depth}"
            )));
        }
        let mut out = vec![FinTree::empty(depth)?];
        for shape in rooted(depth) {
            let mut t = FinTree::empty(depth)?;
            for node in &shape {
                t.insert(&node.bits);
            }
            out.push(t);
        }
        Ok(out)
    }

    /// A random tree containing one forced full branch, so it is deep.
    pub fn random_deep<R: Rng>(depth: usize, keep: f64, rng: &mut R) -> Result<Self, CaseError> {
        let mut t = FinTree::random(depth, keep, rng)?;
        let branch: Vec<bool> = (0..depth).map(|_| rng.gen()).collect();
        t.insert(&branch);
        Ok(t)
    }

    /// Grows from the root, keeping each child with probability `keep`.
    pub fn random<R: Rng>(depth: usize, keep: f64, rng: &mut R) -> Result<Self, CaseError> {
        let mut t = FinTree::empty(depth)?;
        t.levels[0][0] = true;
        for l in 1..=depth {
            for c in 0..1usize << l {
                if t.levels[l - 1][c >> 1] && rng.gen_bool(keep) {
                    t.levels[l][c] = true;
                }
            }
        }
        Ok(t)
    }

    /// A copy with random changes at levels `≥ max(from, 1)`, kept prefix-closed.
    pub fn perturb<R: Rng>(&self, from: usize, rng: &mut R) -> FinTree {
        let mut t = self.clone();
        for l in from.max(1)..=self.depth {
            for c in 0..1usize << l {
                let parent = t.levels[l - 1][c >> 1];
                let flip = rng.gen_bool(0.2);
                t.levels[l][c] = parent && (t.levels[l][c] != flip);
            }
        }
        t
    }
}

impl fmt::Display for FinTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self.nodes().map(|n| n.to_string()).collect();
        write!(f, "{{{}}}", nodes.join(" "))
    }
}

// All non-empty prefix-closed node sets of the given height, as node lists
// rooted at the empty string.
fn rooted(height: usize) -> Vec<Vec<PathPrefix>> {
    if height == 0 {
        return vec![vec![PathPrefix::default()]];
    }
    let sub = rooted(height - 1);
    let mut choices: Vec<Option<&Vec<PathPrefix>>> = vec![None];
    choices.extend(sub.iter().map(Some));
    let graft = |bit: bool, s: &[PathPrefix]| -> Vec<PathPrefix> {
        s.iter()
            .map(|n| {
                let mut bits = vec![bit];
                bits.extend(&n.bits);
                PathPrefix::new(bits)
            })
            .collect()
    };
    let mut out = Vec::new();
    for left in &choices {
        for right in &choices {
            let mut nodes = vec![PathPrefix::default()];
            if let Some(s) = left {
                nodes.extend(graft(false, s));
            }
            if let Some(s) = right {
                nodes.extend(graft(true, s));
            }
            out.push(nodes);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts_of_prefix_closed_trees() {
        // Non-empty shapes satisfy a(h) = (1 + a(h-1))^2, plus the empty tree.
        let counts: Vec<usize> = (0..=3)
            .map(|d| FinTree::enumerate(d).unwrap().len())
            .collect();
        assert_eq!(counts, [2, 5, 26, 677]);
        let all = FinTree::enumerate(3).unwrap();
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 677);
    }

    #[test]
    fn prefix_closure_is_checked() {
        let err = FinTree::parse(3, "ε 0 011").unwrap_err();
        assert!(matches!(err, CaseError::InvalidTree(_)));
        let t = FinTree::parse(3, "ε 0 01 011").unwrap();
        assert!(t.contains(&[false, true, true]));
        assert!(!t.contains(&[true]));
        assert!(t.is_deep());
        assert_eq!(t.least_deep_branch().unwrap().to_string(), "011");
        assert_eq!(t.to_string(), "{ε 0 01 011}");
    }

    #[test]
    fn agreement_and_difference() {
        let a = FinTree::parse(3, "ε 0 1 00 000").unwrap();
        let b = FinTree::parse(3, "ε 0 1 00 01").unwrap();
        assert_eq!(a.first_difference(&b), Some(2));
        assert!(a.agrees_below(&b, 2));
        assert!(!a.agrees_below(&b, 3));
        assert!(a.agrees_below(&a, 100));
    }

    #[test]
    fn random_deep_trees_are_deep_and_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = FinTree::random_deep(8, 0.5, &mut rng).unwrap();
            assert!(t.is_deep());
            t.check_closed().unwrap();
            let p = t.perturb(3, &mut rng);
            p.check_closed().unwrap();
            assert!(t.agrees_below(&p, 3));
        }
    }
}
