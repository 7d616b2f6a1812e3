use std::fmt;

use serde::Serialize;

use super::CaseError;

/// A type-1 object known on a finite prefix: `f(n) = values[n]` below the
/// length, `tail` beyond it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BoundedSeq {
    values: Vec<u64>,
    tail: u64,
}

impl BoundedSeq {
    /// Tail value 1, so there is no zero past the declared values.
    pub fn new(values: Vec<u64>) -> Result<Self, CaseError> {
        Self::with_tail(values, 1)
    }

    pub fn with_tail(values: Vec<u64>, tail: u64) -> Result<Self, CaseError> {
        if values.is_empty() {
            return Err(CaseError::EmptySequence);
        }
        Ok(BoundedSeq { values, tail })
    }

    /// The `len`-bit sequence whose `i`-th value is bit `i` of `bits`
    /// counting from the least significant end.
    pub fn from_bits(bits: u64, len: usize) -> Result<Self, CaseError> {
        Self::new((0..len).map(|i| (bits >> i) & 1).collect())
    }

    pub fn get(&self, n: u64) -> u64 {
        usize::try_from(n)
            .ok()
            .and_then(|i| self.values.get(i).copied())
            .unwrap_or(self.tail)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn tail(&self) -> u64 {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Least `n ≤ bound` with `f(n) = 0`.
    pub fn first_zero(&self, bound: u64) -> Option<u64> {
        // Past the values the sequence is constant, so one tail probe suffices.
        let hi = bound.min(self.values.len() as u64);
        (0..=hi).find(|&n| self.get(n) == 0)
    }
}

impl fmt::Display for BoundedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(u64::to_string).collect();
        write!(f, "<{}>..{}", vals.join(","), self.tail)
    }
}

/// `(μn ≤ M) f(n) = 0` if there is such an `n`, else 0.
pub fn mu_bruteforce(f: &BoundedSeq, m: u64) -> u64 {
    (0..=m).find(|&n| f.get(n) == 0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> BoundedSeq {
        BoundedSeq::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_bruteforce(&seq(&[1, 1, 0, 1]), 10), 2);
        assert_eq!(mu_bruteforce(&seq(&[1]), 1000), 0);
        assert_eq!(mu_bruteforce(&seq(&[0]), 5), 0);
        assert_eq!(mu_bruteforce(&seq(&[1, 1, 0]), 1), 0);
        assert_eq!(
            mu_bruteforce(&BoundedSeq::with_tail(vec![1, 1], 0).unwrap(), 9),
            2
        );
    }

    #[test]
    fn first_zero_agrees_with_scan() {
        for bits in 0..64u64 {
            let f = BoundedSeq::from_bits(bits, 6).unwrap();
            for bound in 0..9 {
                let scan = (0..=bound).find(|&n| f.get(n) == 0);
                assert_eq!(f.first_zero(bound), scan, "{f} {bound}");
            }
        }
    }

    #[test]
    fn empty_values_rejected() {
        assert_eq!(BoundedSeq::new(vec![]), Err(CaseError::EmptySequence));
    }
}
