use std::fmt;
use std::sync::Arc;

/// A named indeterminate. Symbols order lexicographically by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Ansatz coefficient symbol `<prefix>_<i>`.
    pub fn indexed(prefix: &str, i: i32) -> Self {
        Symbol::new(&format!("{prefix}_{i}"))
    }

    /// Inverse of [`Symbol::indexed`].
    pub fn index_for(&self, prefix: &str) -> Option<i32> {
        self.0
            .strip_prefix(prefix)
            .and_then(|rest| rest.strip_prefix('_'))
            .and_then(|idx| idx.parse().ok())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexed_round_trip() {
        for i in -3..=3 {
            assert_eq!(Symbol::indexed("alpha", i).index_for("alpha"), Some(i));
        }
        assert_eq!(Symbol::new("alpha_-2").name(), "alpha_-2");
        assert_eq!(Symbol::new("alphax_1").index_for("alpha"), None);
    }

    #[test]
    fn ordering_is_lexicographic() {
        let mut v: Vec<Symbol> = ["mu", "K", "alpha_0", "C", "lambda"]
            .iter()
            .map(|s| Symbol::new(s))
            .collect();
        v.sort();
        let names: Vec<_> = v.iter().map(|s| s.name()).collect();
        assert_eq!(names, ["C", "K", "alpha_0", "lambda", "mu"]);
    }
}
