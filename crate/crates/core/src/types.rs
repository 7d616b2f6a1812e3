//! Finite types: `0`, `σ → τ` and the sequence types `σ*`.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// A finite type. Structural equality is the only notion of type equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiniteType {
    /// The base type `0` of natural numbers.
    Nat,
    Arrow(Arc<FiniteType>, Arc<FiniteType>),
    /// `σ*`, finite sequences of `σ`.
    Seq(Arc<FiniteType>),
}

impl FiniteType {
    pub fn arrow(dom: FiniteType, cod: FiniteType) -> Self {
        FiniteType::Arrow(Arc::new(dom), Arc::new(cod))
    }

    pub fn seq(elem: FiniteType) -> Self {
        FiniteType::Seq(Arc::new(elem))
    }

    /// Type `1`, i.e. `0 → 0`.
    pub fn one() -> Self {
        Self::arrow(FiniteType::Nat, FiniteType::Nat)
    }

    /// Type `2`, i.e. `1 → 0`.
    pub fn two() -> Self {
        Self::arrow(Self::one(), FiniteType::Nat)
    }

    /// The pure type `n`: `0`, and `n+1 = n → 0`.
    pub fn pure(n: usize) -> Self {
        (0..n).fold(FiniteType::Nat, |t, _| Self::arrow(t, FiniteType::Nat))
    }

    /// `Some(n)` when this is the pure type `n`.
    pub fn pure_level(&self) -> Option<usize> {
        match self {
            FiniteType::Nat => Some(0),
            FiniteType::Arrow(d, c) if **c == FiniteType::Nat => d.pure_level().map(|n| n + 1),
            _ => None,
        }
    }

    /// `σ₁ → … → σₙ → τ`.
    pub fn curried(args: impl IntoIterator<Item = FiniteType>, result: FiniteType) -> Self {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, a| FiniteType::arrow(a, acc))
    }

    pub fn is_nat(&self) -> bool {
        matches!(self, FiniteType::Nat)
    }

    /// Splits `τ₁ → … → τₖ → ρ` into `([τ₁..τₖ], ρ)` with `ρ` not an arrow.
    pub fn uncurry(&self) -> (Vec<FiniteType>, FiniteType) {
        let mut args = Vec::new();
        let mut cur = self;
        while let FiniteType::Arrow(d, c) = cur {
            args.push((**d).clone());
            cur = c;
        }
        (args, cur.clone())
    }

    pub fn depth(&self) -> usize {
        match self {
            FiniteType::Nat => 0,
            FiniteType::Arrow(d, c) => 1 + d.depth().max(c.depth()),
            FiniteType::Seq(e) => 1 + e.depth(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, arrow_left: bool) -> fmt::Result {
        if let Some(n) = self.pure_level() {
            return write!(f, "{n}");
        }
        match self {
            FiniteType::Nat => write!(f, "0"),
            FiniteType::Seq(e) => {
                if matches!(**e, FiniteType::Arrow(..)) && e.pure_level().is_none() {
                    write!(f, "(")?;
                    e.fmt_prec(f, false)?;
                    write!(f, ")*")
                } else {
                    e.fmt_prec(f, false)?;
                    write!(f, "*")
                }
            }
            FiniteType::Arrow(d, c) => {
                if arrow_left {
                    write!(f, "(")?;
                }
                d.fmt_prec(f, true)?;
                write!(f, " -> ")?;
                c.fmt_prec(f, false)?;
                if arrow_left {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

impl fmt::Debug for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for FiniteType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abbreviations_print_compactly() {
        assert_eq!(FiniteType::one().to_string(), "1");
        assert_eq!(FiniteType::two().to_string(), "2");
        assert_eq!(FiniteType::pure(3).to_string(), "3");
        assert_eq!(FiniteType::pure(3).pure_level(), Some(3));
        assert_eq!(
            FiniteType::arrow(FiniteType::one(), FiniteType::one()).pure_level(),
            None
        );
        assert_eq!(
            FiniteType::arrow(FiniteType::one(), FiniteType::one()).to_string(),
            "1 -> 1"
        );
        let t = FiniteType::arrow(FiniteType::seq(FiniteType::Nat), FiniteType::Nat);
        assert_eq!(t.to_string(), "0* -> 0");
        let s = FiniteType::seq(FiniteType::arrow(FiniteType::Nat, FiniteType::one()));
        assert_eq!(s.to_string(), "(0 -> 1)*");
    }

    #[test]
    fn uncurry_splits_arguments() {
        let t = FiniteType::curried([FiniteType::one(), FiniteType::Nat], FiniteType::Nat);
        let (args, res) = t.uncurry();
        assert_eq!(args, vec![FiniteType::one(), FiniteType::Nat]);
        assert_eq!(res, FiniteType::Nat);
        assert_eq!(t.depth(), 2);
    }
}
