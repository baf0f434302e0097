//! Probability vectors and utility-valued acts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::Event;

/// Normalization tolerance for priors.
pub const TAU_NORM: f64 = 1e-9;

/// A probability vector over a finite state space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prior(Vec<f64>);

impl Prior {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        if probs.iter().any(|p| !p.is_finite() || *p < -TAU_NORM) {
            return Err(Error::InvalidPrior(format!("negative or non-finite entry in {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TAU_NORM {
            return Err(Error::InvalidPrior(format!("entries sum to {total}")));
        }
        Ok(Self(probs.into_iter().map(|p| p.max(0.0)).collect()))
    }

    /// Builds a prior from values that are a probability vector up to float
    /// noise from arithmetic on valid priors.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        Self(probs.into_iter().map(|p| p.max(0.0)).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn prob(&self, event: &Event) -> f64 {
        event.members().map(|i| self.0[i]).sum()
    }

    /// Expected utility of `act`.
    pub fn expect(&self, act: &Act) -> f64 {
        self.0.iter().zip(act.utils()).map(|(p, u)| p * u).sum()
    }

    /// `weight * self + (1 - weight) * other`, pointwise.
    pub fn mix(&self, other: &Prior, weight: f64) -> Prior {
        Prior::from_raw(self.0.iter().zip(&other.0).map(|(a, b)| weight * a + (1.0 - weight) * b).collect())
    }

    pub fn max_abs_diff(&self, other: &Prior) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Conditions `p` on `event` by Bayes' rule.
pub fn bayes_update(p: &Prior, event: &Event) -> Result<Prior> {
    if event.n_states() != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: event.n_states() });
    }
    let mass = p.prob(event);
    if mass <= TAU_NORM {
        return Err(Error::ZeroLikelihood);
    }
    Ok(Prior::from_raw(
        p.probs().iter().enumerate().map(|(i, &v)| if event.contains(i) { v / mass } else { 0.0 }).collect(),
    ))
}

/// Utility profile of an act: one utility per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Act(Vec<f64>);

impl Act {
    pub fn new(utils: Vec<f64>) -> Result<Self> {
        if utils.is_empty() {
            return Err(Error::EmptyInput);
        }
        if utils.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidAct(format!("non-finite utility in {utils:?}")));
        }
        Ok(Self(utils))
    }

    pub(crate) fn from_raw(utils: Vec<f64>) -> Self {
        Self(utils)
    }

    pub fn constant(n: usize, u: f64) -> Self {
        Self(vec![u; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn utils(&self) -> &[f64] {
        &self.0
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// `weight * self + (1 - weight) * other` (an Anscombe-Aumann mixture).
    pub fn mix(&self, other: &Act, weight: f64) -> Act {
        Act(self.0.iter().zip(&other.0).map(|(a, b)| weight * a + (1.0 - weight) * b).collect())
    }

    /// `weight * self + (1 - weight) * c` for a constant act `c`.
    pub fn mix_const(&self, c: f64, weight: f64) -> Act {
        Act(self.0.iter().map(|a| weight * a + (1.0 - weight) * c).collect())
    }

    pub fn scale(&self, factor: f64) -> Act {
        Act(self.0.iter().map(|a| a * factor).collect())
    }

    /// Smallest and largest utility on `event`.
    pub fn range_on(&self, event: &Event) -> (f64, f64) {
        event.members().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| (lo.min(self.0[i]), hi.max(self.0[i])))
    }
}

/// The act paying `f` on `event` and `h` off it.
pub fn splice(f: &Act, event: &Event, h: &Act) -> Act {
    Act(f.0.iter().zip(&h.0).enumerate().map(|(i, (a, b))| if event.contains(i) { *a } else { *b }).collect())
}

/// The act paying `f` on `event` and the constant `x` off it.
pub fn splice_const(f: &Act, event: &Event, x: f64) -> Act {
    Act(f.0.iter().enumerate().map(|(i, a)| if event.contains(i) { *a } else { x }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_validation() {
        assert!(Prior::new(vec![0.5, 0.5]).is_ok());
        assert!(Prior::new(vec![0.6, 0.5]).is_err());
        assert!(Prior::new(vec![-0.1, 1.1]).is_err());
        assert!(Prior::new(vec![]).is_err());
    }

    #[test]
    fn bayes_examples() {
        let u = Prior::uniform(3);
        let full = Event::full(3);
        let post = bayes_update(&u, &full).unwrap();
        assert!(post.max_abs_diff(&u) < 1e-15);

        let e = Event::new(3, &[0, 1]).unwrap();
        let post = bayes_update(&u, &e).unwrap();
        assert!(post.max_abs_diff(&Prior::new(vec![0.5, 0.5, 0.0]).unwrap()) < 1e-15);

        let p = Prior::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(bayes_update(&p, &e), Err(Error::ZeroLikelihood));
    }

    #[test]
    fn signal_model_posterior() {
        // mu = 1 vertex of the signal model with beta=0.6, l1=0.8, l2=0.6;
        // cells (t1,s1), (t2,s1), (t1,s2), (t2,s2)
        let p = Prior::new(vec![0.48, 0.08, 0.12, 0.32]).unwrap();
        let s1 = Event::new(4, &[0, 1]).unwrap();
        let post = bayes_update(&p, &s1).unwrap();
        assert!((post.probs()[0] - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn splice_examples() {
        let f = Act::new(vec![1.0, 0.0, 0.0]).unwrap();
        let h = Act::new(vec![9.0, 9.0, 9.0]).unwrap();
        assert_eq!(splice(&f, &Event::full(3), &h), f);
        assert_eq!(splice(&f, &Event::empty(3), &h), h);
        let e = Event::new(3, &[0, 1]).unwrap();
        assert_eq!(splice(&f, &e, &h).utils(), &[1.0, 0.0, 9.0]);
        assert_eq!(splice_const(&f, &e, 9.0), splice(&f, &e, &h));
    }
}
