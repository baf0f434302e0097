//! Finite state spaces and events over them.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest state space an [`Event`] bitmask can index.
pub const MAX_STATES: usize = 64;

/// Ordered, uniquely labelled states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpace {
    labels: Vec<String>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::InvalidStateSpace(format!("need at least two states, got {}", labels.len())));
        }
        if labels.len() > MAX_STATES {
            return Err(Error::InvalidStateSpace(format!("at most {MAX_STATES} states are supported")));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidStateSpace(format!("duplicate label `{l}`")));
            }
        }
        Ok(Self { labels })
    }

    /// States named `w1..wn`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("w{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn event<S: AsRef<str>>(&self, labels: &[S]) -> Result<Event> {
        let idx = labels
            .iter()
            .map(|l| self.index_of(l.as_ref()).ok_or_else(|| Error::UnknownState(l.as_ref().to_string())))
            .collect::<Result<Vec<_>>>()?;
        Event::new(self.len(), &idx)
    }
}

/// A subset of the state indices `0..n`, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Event {
    n: usize,
    bits: u64,
}

impl Event {
    pub fn new(n: usize, members: &[usize]) -> Result<Self> {
        if n > MAX_STATES {
            return Err(Error::InvalidStateSpace(format!("at most {MAX_STATES} states are supported")));
        }
        let mut bits = 0u64;
        for &i in members {
            if i >= n {
                return Err(Error::DimensionMismatch { expected: n, got: i + 1 });
            }
            bits |= 1 << i;
        }
        Ok(Self { n, bits })
    }

    pub fn full(n: usize) -> Self {
        let bits = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        Self { n, bits }
    }

    pub fn empty(n: usize) -> Self {
        Self { n, bits: 0 }
    }

    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.bits & (1 << i) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        *self == Self::full(self.n)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn complement(&self) -> Self {
        Self { n: self.n, bits: !self.bits & Self::full(self.n).bits }
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.contains(i))
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.members().collect()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().map(|i| format!("w{}", i + 1)).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_must_be_unique_and_plural() {
        assert!(StateSpace::new(["a", "b", "a"]).is_err());
        assert!(StateSpace::new(["a"]).is_err());
        assert!(StateSpace::new(["a", "b"]).is_ok());
    }

    #[test]
    fn event_from_labels() {
        let s = StateSpace::new(["w1", "w2", "w3"]).unwrap();
        let e = s.event(&["w1", "w2"]).unwrap();
        assert_eq!(e.to_indices(), vec![0, 1]);
        assert_eq!(e.complement().to_indices(), vec![2]);
        assert!(matches!(s.event(&["w9"]), Err(Error::UnknownState(_))));
    }

    #[test]
    fn full_and_empty() {
        assert!(Event::full(3).is_full());
        assert_eq!(Event::full(3).len(), 3);
        assert!(Event::empty(3).is_empty());
        assert_eq!(Event::full(3).complement(), Event::empty(3));
        assert!(Event::new(3, &[3]).is_err());
    }
}
