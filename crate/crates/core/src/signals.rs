//! Ambiguous signals about a binary state: a known prior over the state and
//! two signal devices of different accuracy mixed in unknown proportion.
//!
//! Cells are ordered `(t1,s1), (t2,s1), (t1,s2), (t2,s2)`. The prior `p_mu`
//! draws the signal from the first device with probability `mu`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::axioms::TAU_AXIOM;
use crate::credal::{hull_reduce, CredalSet};
use crate::error::{Error, Result};
use crate::prior::Prior;
use crate::space::{Event, StateSpace};
use crate::update::{update, UpdateRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalModel {
    /// Prior probability of `t1`.
    pub beta: f64,
    /// Accuracy of the first device.
    pub lambda1: f64,
    /// Accuracy of the second device.
    pub lambda2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signal {
    S1,
    S2,
}

impl Signal {
    pub const BOTH: [Signal; 2] = [Signal::S1, Signal::S2];

    /// Cells of the four-cell space where this signal is observed.
    pub fn event(self) -> Event {
        match self {
            Signal::S1 => Event::new(4, &[0, 1]).expect("static"),
            Signal::S2 => Event::new(4, &[2, 3]).expect("static"),
        }
    }

    fn theta1_cell(self) -> usize {
        match self {
            Signal::S1 => 0,
            Signal::S2 => 2,
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signal::S1 => "s1",
            Signal::S2 => "s2",
        })
    }
}

impl FromStr for Signal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s1" => Ok(Signal::S1),
            "s2" => Ok(Signal::S2),
            other => Err(Error::UnknownState(other.to_string())),
        }
    }
}

/// Which priors maximize the likelihood of the observed signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MlPrior {
    Mu(f64),
    All,
}

impl fmt::Display for MlPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MlPrior::Mu(m) => write!(f, "mu={m}"),
            MlPrior::All => f.write_str("all"),
        }
    }
}

/// Conditional value of the bet on `t1` relative to a probabilistic signal
/// of average accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Lower,
    Equal,
    Higher,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Lower => "lower",
            Comparison::Equal => "equal",
            Comparison::Higher => "higher",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalRow {
    pub beta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha: f64,
    pub signal: Signal,
    pub ml_prior: MlPrior,
    pub eval_f: f64,
    pub benchmark: f64,
    pub comparison: Comparison,
}

impl SignalModel {
    pub fn new(beta: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        let m = Self { beta, lambda1, lambda2 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::BadModel(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if self.lambda1 < self.lambda2 {
            return Err(Error::BadModel("lambda1 must be at least lambda2".into()));
        }
        if self.lambda1 + self.lambda2 < 1.0 {
            return Err(Error::BadModel("average accuracy must be at least 1/2".into()));
        }
        Ok(())
    }

    fn accuracy(&self, mu: f64) -> f64 {
        mu * self.lambda1 + (1.0 - mu) * self.lambda2
    }

    /// Cell probabilities of `p_mu`.
    pub fn prior(&self, mu: f64) -> [f64; 4] {
        let (b, l) = (self.beta, self.accuracy(mu));
        [b * l, (1.0 - b) * (1.0 - l), b * (1.0 - l), (1.0 - b) * l]
    }

    /// `pi_mu(t1 | signal)` directly from the cell probabilities.
    pub fn posterior_theta1(&self, mu: f64, signal: Signal) -> f64 {
        let p = self.prior(mu);
        let (a, b) = match signal {
            Signal::S1 => (p[0], p[1]),
            Signal::S2 => (p[2], p[3]),
        };
        a / (a + b)
    }

    /// Bayesian posterior of `t1` after a probabilistic device whose accuracy
    /// is the average of the two.
    pub fn benchmark_posterior(&self, signal: Signal) -> f64 {
        let l = 0.5 * (self.lambda1 + self.lambda2);
        let b = self.beta;
        match signal {
            Signal::S1 => b * l / (b * l + (1.0 - b) * (1.0 - l)),
            Signal::S2 => b * (1.0 - l) / (b * (1.0 - l) + (1.0 - b) * l),
        }
    }

    /// Maximum-likelihood prior for each of the six (beta, signal) cases.
    pub fn ml_prior(&self, signal: Signal) -> MlPrior {
        let tie = |a: f64, b: f64| (a - b).abs() <= TAU_AXIOM;
        if tie(self.lambda1, self.lambda2) || tie(self.beta, 0.5) {
            return MlPrior::All;
        }
        match (self.beta > 0.5, signal) {
            (true, Signal::S1) | (false, Signal::S2) => MlPrior::Mu(1.0),
            (true, Signal::S2) | (false, Signal::S1) => MlPrior::Mu(0.0),
        }
    }
}

pub fn state_space() -> StateSpace {
    StateSpace::new(["t1s1", "t2s1", "t1s2", "t2s2"]).expect("static labels")
}

/// The four-cell state space and the hull of `p_0` and `p_1`.
pub fn build_signal_credal(m: &SignalModel) -> Result<(StateSpace, CredalSet)> {
    m.validate()?;
    let verts = [m.prior(0.0), m.prior(1.0)].into_iter().map(|p| Prior::new(p.to_vec())).collect::<Result<Vec<_>>>()?;
    Ok((state_space(), hull_reduce(verts)?))
}

/// Range of posteriors of `t1` after `signal` under RML with weight `alpha`.
pub fn posterior_interval(m: &SignalModel, alpha: f64, signal: Signal) -> Result<(f64, f64)> {
    let (_, c) = build_signal_credal(m)?;
    let post = update(&c, &signal.event(), &UpdateRule::Rml(alpha))?;
    let cell = signal.theta1_cell();
    Ok(post.vertices().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let t = v.probs()[cell];
        (lo.min(t), hi.max(t))
    }))
}

pub fn table1_row(m: &SignalModel, alpha: f64, signal: Signal) -> Result<SignalRow> {
    let (eval_f, _) = posterior_interval(m, alpha, signal)?;
    let benchmark = m.benchmark_posterior(signal);
    let comparison = if (eval_f - benchmark).abs() <= TAU_AXIOM {
        Comparison::Equal
    } else if eval_f < benchmark {
        Comparison::Lower
    } else {
        Comparison::Higher
    };
    Ok(SignalRow {
        beta: m.beta,
        lambda1: m.lambda1,
        lambda2: m.lambda2,
        alpha,
        signal,
        ml_prior: m.ml_prior(signal),
        eval_f,
        benchmark,
        comparison,
    })
}

/// Rows for both signals and every `alpha`, signal-major.
pub fn table1(m: &SignalModel, alphas: &[f64]) -> Result<Vec<SignalRow>> {
    let mut rows = Vec::with_capacity(2 * alphas.len());
    for s in Signal::BOTH {
        for &a in alphas {
            rows.push(table1_row(m, a, s)?);
        }
    }
    Ok(rows)
}
