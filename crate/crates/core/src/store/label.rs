use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Address of one cell of the store. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

pub const FRESH_PREFIX: char = '%';

impl Label {
    pub fn new(s: impl AsRef<str>) -> Label {
        Label(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_generated(&self) -> bool {
        self.0.starts_with(FRESH_PREFIX)
    }

    fn generated_index(&self) -> Option<u64> {
        self.0.strip_prefix(FRESH_PREFIX)?.parse().ok()
    }

    /// Whether `s` can name a label in the textual formats.
    pub fn is_valid_name(s: &str) -> bool {
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' || c == FRESH_PREFIX => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == FRESH_PREFIX)
            && !RESERVED.contains(&s)
            && !s.starts_with("proj_")
    }
}

/// Words the trace syntax claims for itself.
pub const RESERVED: &[&str] = &["t", "f", "true", "false", "U", "union", "comp", "sum", "cond", "empty"];

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Label {
        Label::new(s)
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Label, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Label::new(s))
    }
}

/// Deterministic supply of `%<n>` labels.
#[derive(Clone, Debug)]
pub struct FreshSupply {
    next: u64,
}

impl Default for FreshSupply {
    fn default() -> Self {
        FreshSupply { next: 1 }
    }
}

impl FreshSupply {
    pub fn starting_at(next: u64) -> FreshSupply {
        FreshSupply { next: next.max(1) }
    }

    /// A supply whose labels avoid every label in `used`.
    pub fn avoiding<'a>(used: impl IntoIterator<Item = &'a Label>) -> FreshSupply {
        let max = used.into_iter().filter_map(Label::generated_index).max().unwrap_or(0);
        FreshSupply { next: max + 1 }
    }

    pub fn fresh(&mut self) -> Label {
        let l = Label::new(format!("{FRESH_PREFIX}{}", self.next));
        self.next += 1;
        l
    }

    pub fn peek(&self) -> u64 {
        self.next
    }

    /// Move past every label in `used`.
    pub fn skip_past<'a>(&mut self, used: impl IntoIterator<Item = &'a Label>) {
        let other = FreshSupply::avoiding(used);
        self.next = self.next.max(other.next);
    }
}

pub type LabelSet = BTreeSet<Label>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supply_avoids_existing_generated_labels() {
        let used = [Label::new("%3"), Label::new("r1"), Label::new("%10")];
        let mut s = FreshSupply::avoiding(&used);
        assert_eq!(s.fresh().as_str(), "%11");
        assert_eq!(s.fresh().as_str(), "%12");
    }

    #[test]
    fn user_names_cannot_look_generated_or_reserved() {
        assert!(Label::is_valid_name("r11"));
        assert!(Label::is_valid_name("l12'"));
        assert!(!Label::is_valid_name("12"));
        assert!(!Label::is_valid_name("t"));
        assert!(!Label::is_valid_name("proj_A"));
    }
}
