//! Deterministic fresh-name supply, one per translation session.

use std::collections::HashSet;

/// Hands out variable names that have not been used in the session.
///
/// A fresh name is the base with its numeric suffix stripped, followed by a
/// new suffix drawn from a monotone counter. The bare base is handed out when
/// it is still unused.
#[derive(Debug, Clone, Default)]
pub struct NameSupply {
    counter: u64,
    used: HashSet<String>,
}

impl NameSupply {
    pub fn new() -> Self {
        Self::default()
    }

    /// Marks names as taken without handing them out.
    pub fn reserve<I, S>(&mut self, names: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.used.extend(names.into_iter().map(Into::into));
    }

    pub fn is_used(&self, name: &str) -> bool {
        self.used.contains(name)
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { "v" } else { stem };
        if !self.used.contains(stem) {
            self.used.insert(stem.to_string());
            return stem.to_string();
        }
        loop {
            self.counter += 1;
            let cand = format!("{stem}{}", self.counter);
            if self.used.insert(cand.clone()) {
                return cand;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_names_are_distinct_and_deterministic() {
        let mut a = NameSupply::new();
        a.reserve(["n", "w"]);
        let xs: Vec<_> = (0..3).map(|_| a.fresh("n")).collect();
        assert_eq!(xs, ["n1", "n2", "n3"]);
        assert_eq!(a.fresh("y"), "y");
        assert_eq!(a.fresh("w7"), "w4");
    }
}
