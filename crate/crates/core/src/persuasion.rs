//! Persuasion with an ambiguous device: the sender commits to a set of
//! signal kernels, the receiver updates the induced joint priors and best
//! responds, and the sender evaluates the outcome by maxmin expected utility.

use serde::{Deserialize, Serialize};

use crate::credal::{contract, event_prob_bounds, hull_reduce, meu_value, CredalSet, TAU_GEOM};
use crate::error::{Error, Result};
use crate::prior::{bayes_update, Act, Prior, TAU_NORM};
use crate::space::{Event, StateSpace};
use crate::update::{update, UpdateRule};

const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersuasionGame {
    pub states: StateSpace,
    pub prior: Prior,
    pub actions: Vec<String>,
    /// `sender_payoff[action][state]`.
    pub sender_payoff: Vec<Vec<f64>>,
    /// `receiver_payoff[action][state]`.
    pub receiver_payoff: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguousDevice {
    pub messages: Vec<String>,
    /// `kernels[k][message][state]`; every column sums to one.
    pub kernels: Vec<Vec<Vec<f64>>>,
}

impl PersuasionGame {
    pub fn new(
        states: StateSpace,
        prior: Prior,
        actions: Vec<String>,
        sender_payoff: Vec<Vec<f64>>,
        receiver_payoff: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let g = Self { states, prior, actions, sender_payoff, receiver_payoff };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if self.prior.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.prior.len() });
        }
        if self.actions.is_empty() {
            return Err(Error::BadGame("no actions".into()));
        }
        for (name, m) in [("sender", &self.sender_payoff), ("receiver", &self.receiver_payoff)] {
            if m.len() != self.actions.len() || m.iter().any(|row| row.len() != n) {
                return Err(Error::BadGame(format!(
                    "{name} payoff must be {} actions by {n} states",
                    self.actions.len()
                )));
            }
            if m.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::BadGame(format!("{name} payoff has a non-finite entry")));
            }
        }
        Ok(())
    }

    /// Two equally likely states; the sender wants higher actions, the
    /// receiver wants to match the state.
    pub fn example() -> Self {
        Self::new(
            StateSpace::new(["wl", "wh"]).expect("static"),
            Prior::uniform(2),
            vec!["al".into(), "am".into(), "ah".into()],
            vec![vec![-1.0, -1.0], vec![0.0, 0.0], vec![1.0, 1.0]],
            vec![vec![3.0, -1.0], vec![2.0, 2.0], vec![-1.0, 3.0]],
        )
        .expect("static game")
    }

    fn n_states(&self) -> usize {
        self.states.len()
    }

    /// Receiver's best action at a belief; ties go to the sender's favourite.
    fn best_response(&self, belief: &[f64]) -> usize {
        let dot = |row: &[f64]| row.iter().zip(belief).map(|(a, b)| a * b).sum::<f64>();
        let best = self.receiver_payoff.iter().map(|r| dot(r)).fold(f64::NEG_INFINITY, f64::max);
        (0..self.actions.len())
            .filter(|&a| dot(&self.receiver_payoff[a]) >= best - TIE_TOL)
            .max_by(|&a, &b| dot(&self.sender_payoff[a]).total_cmp(&dot(&self.sender_payoff[b])).then(b.cmp(&a)))
            .expect("at least one action")
    }
}

impl AmbiguousDevice {
    pub fn new(messages: Vec<String>, kernels: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let d = Self { messages, kernels };
        if d.kernels.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(d)
    }

    fn validate_for(&self, g: &PersuasionGame) -> Result<()> {
        let n = g.n_states();
        let m = self.messages.len();
        for k in &self.kernels {
            if k.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: k.len() });
            }
            if let Some(row) = k.iter().find(|row| row.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            for w in 0..n {
                let col: f64 = k.iter().map(|row| row[w]).sum();
                if (col - 1.0).abs() > TAU_NORM || k.iter().any(|row| row[w] < -TAU_NORM) {
                    return Err(Error::BadGame(format!("kernel column {w} is not a distribution")));
                }
            }
        }
        Ok(())
    }
}

/// The two-kernel device whose kernels swap the roles of `ml` and `ml'`.
pub fn bll_device(lambda: f64) -> Result<AmbiguousDevice> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::BadLambda(lambda));
    }
    let l = lambda;
    let sent_low = [2.0 / 3.0 * l, 0.0];
    let mixed = [0.75 * (1.0 - l), 0.25 * (1.0 - l)];
    let high = [l / 3.0 + 0.25 * (1.0 - l), l + 0.75 * (1.0 - l)];
    AmbiguousDevice::new(
        vec!["ml".into(), "ml'".into(), "mh".into()],
        vec![
            vec![sent_low.to_vec(), mixed.to_vec(), high.to_vec()],
            vec![mixed.to_vec(), sent_low.to_vec(), high.to_vec()],
        ],
    )
}

/// Joint state space of `(state, message)` pairs, message-major.
pub fn joint_space(g: &PersuasionGame, d: &AmbiguousDevice) -> Result<StateSpace> {
    StateSpace::new(d.messages.iter().flat_map(|m| g.states.labels().iter().map(move |w| format!("{w}|{m}"))))
}

fn message_event(g: &PersuasionGame, d: &AmbiguousDevice, m: usize) -> Event {
    let n = g.n_states();
    let cells: Vec<usize> = (0..n).map(|w| m * n + w).collect();
    Event::new(n * d.messages.len(), &cells).expect("cells in range")
}

/// Joint priors `prior(w) * kernel(m | w)`, one per kernel.
pub fn device_prior_set(g: &PersuasionGame, d: &AmbiguousDevice) -> Result<CredalSet> {
    g.validate()?;
    d.validate_for(g)?;
    let n = g.n_states();
    let pts = d
        .kernels
        .iter()
        .map(|k| {
            let mut joint = vec![0.0; n * d.messages.len()];
            for (m, row) in k.iter().enumerate() {
                for w in 0..n {
                    joint[m * n + w] = g.prior.probs()[w] * row[w];
                }
            }
            Prior::new(joint)
        })
        .collect::<Result<Vec<_>>>()?;
    hull_reduce(pts)
}

/// Total probability of each message under each kernel.
pub fn message_likelihoods(d: &AmbiguousDevice, g: &PersuasionGame) -> Vec<Vec<f64>> {
    d.kernels
        .iter()
        .map(|k| k.iter().map(|row| row.iter().zip(g.prior.probs()).map(|(a, b)| a * b).sum()).collect())
        .collect()
}

/// Whether every kernel sends every message with the same total probability.
pub fn is_uniform_likelihood(d: &AmbiguousDevice, g: &PersuasionGame) -> bool {
    let lik = message_likelihoods(d, g);
    lik.iter().all(|row| row.iter().zip(&lik[0]).all(|(a, b)| (a - b).abs() <= TAU_GEOM))
}

/// Posterior set over the joint space after message event `e`. A message
/// that some kernels never send is conditioned on the priors that can send
/// it.
fn message_posterior(c: &CredalSet, e: &Event, rule: &UpdateRule) -> Result<CredalSet> {
    let (lo, _) = event_prob_bounds(c, e);
    let alpha = rule.alpha_for(e)?;
    match alpha {
        Some(a) if lo <= TAU_NORM => {
            let kept = contract(c, e, a)?;
            let posts = kept
                .vertices()
                .iter()
                .filter(|v| v.prob(e) > TAU_NORM)
                .map(|v| bayes_update(v, e))
                .collect::<Result<Vec<_>>>()?;
            hull_reduce(posts)
        }
        _ => update(c, e, rule),
    }
}

/// Posterior sets over states, one per message; `None` for messages that no
/// kernel sends.
pub fn message_posteriors(
    g: &PersuasionGame,
    d: &AmbiguousDevice,
    rule: &UpdateRule,
) -> Result<Vec<Option<Vec<Vec<f64>>>>> {
    let c = device_prior_set(g, d)?;
    let n = g.n_states();
    (0..d.messages.len())
        .map(|m| {
            let e = message_event(g, d, m);
            if event_prob_bounds(&c, &e).1 <= TAU_NORM {
                return Ok(None);
            }
            let post = message_posterior(&c, &e, rule)?;
            Ok(Some(post.vertices().iter().map(|v| v.probs()[m * n..(m + 1) * n].to_vec()).collect()))
        })
        .collect()
}

/// The receiver's action after each message (`None` when never sent):
/// maxmin over the posterior set, ties broken toward the action the sender
/// values most under the same posterior set.
pub fn receiver_response(g: &PersuasionGame, d: &AmbiguousDevice, rule: &UpdateRule) -> Result<Vec<Option<usize>>> {
    let posts = message_posteriors(g, d, rule)?;
    Ok(posts
        .into_iter()
        .map(|p| {
            p.map(|beliefs| {
                let set = CredalSet::from_vecs(beliefs).expect("posteriors are priors");
                let value = |pay: &[f64]| meu_value(&set, &Act::new(pay.to_vec()).expect("finite"));
                let best = g.receiver_payoff.iter().map(|r| value(r)).fold(f64::NEG_INFINITY, f64::max);
                (0..g.actions.len())
                    .filter(|&a| value(&g.receiver_payoff[a]) >= best - TIE_TOL)
                    .max_by(|&a, &b| value(&g.sender_payoff[a]).total_cmp(&value(&g.sender_payoff[b])).then(b.cmp(&a)))
                    .expect("at least one action")
            })
        })
        .collect())
}

/// Sender's maxmin expected payoff over kernels given the receiver's play.
pub fn sender_value(g: &PersuasionGame, d: &AmbiguousDevice, rule: &UpdateRule) -> Result<f64> {
    let response = receiver_response(g, d, rule)?;
    Ok(d.kernels
        .iter()
        .map(|k| {
            let mut v = 0.0;
            for (m, row) in k.iter().enumerate() {
                if let Some(a) = response[m] {
                    for ((p, r), u) in g.prior.probs().iter().zip(row).zip(&g.sender_payoff[a]) {
                        v += p * r * u;
                    }
                }
            }
            v
        })
        .fold(f64::INFINITY, f64::min))
}

/// Value at the prior of the upper concave envelope of the sender's payoff
/// as a function of the posterior probability of the second state, sampled
/// on `grid + 1` evenly spaced points plus the prior.
pub fn bayesian_optimum(g: &PersuasionGame, grid: usize) -> Result<f64> {
    g.validate()?;
    if g.n_states() != 2 {
        return Err(Error::NotTwoStates(g.n_states()));
    }
    let grid = grid.max(1);
    let q0 = g.prior.probs()[1];
    let mut qs: Vec<f64> = (0..=grid).map(|k| k as f64 / grid as f64).collect();
    qs.push(q0);
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    let pts: Vec<(f64, f64)> = qs
        .into_iter()
        .map(|q| {
            let belief = [1.0 - q, q];
            let a = g.best_response(&belief);
            (q, g.sender_payoff[a][0] * (1.0 - q) + g.sender_payoff[a][1] * q)
        })
        .collect();

    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    for w in hull.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x0 <= q0 && q0 <= x1 {
            return Ok(if x1 == x0 { y0.max(y1) } else { y0 + (y1 - y0) * (q0 - x0) / (x1 - x0) });
        }
    }
    Ok(hull[0].1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub alpha: f64,
    pub actions: Vec<Option<String>>,
    pub sender_value: f64,
    pub uniform_likelihood: bool,
}

/// Receiver play and sender value on the example game for every
/// `(lambda, alpha)` pair, lambda-major.
pub fn sweep(g: &PersuasionGame, lambdas: &[f64], alphas: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(lambdas.len() * alphas.len());
    for &l in lambdas {
        let d = bll_device(l)?;
        let uniform = is_uniform_likelihood(&d, g);
        for &a in alphas {
            let rule = UpdateRule::Rml(a);
            let actions =
                receiver_response(g, &d, &rule)?.into_iter().map(|x| x.map(|i| g.actions[i].clone())).collect();
            rows.push(SweepRow {
                lambda: l,
                alpha: a,
                actions,
                sender_value: sender_value(g, &d, &rule)?,
                uniform_likelihood: uniform,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names<'a>(g: &'a PersuasionGame, r: &[Option<usize>]) -> Vec<&'a str> {
        r.iter().map(|a| g.actions[a.unwrap()].as_str()).collect()
    }

    #[test]
    fn device_tables() {
        let d = bll_device(0.6).unwrap();
        assert!((d.kernels[0][0][0] - 0.4).abs() < 1e-15);
        let d1 = bll_device(1.0).unwrap();
        assert_eq!(d1.kernels[0][1][0], 0.0);
        assert_eq!(d1.kernels[1][0][0], 0.0);
        assert!(bll_device(1.5).is_err());
        // at zero the kernels agree once ml and ml' are swapped
        let d0 = bll_device(0.0).unwrap();
        assert_eq!(d0.kernels[0][0], d0.kernels[1][1]);
        assert_eq!(d0.kernels[0][1], d0.kernels[1][0]);
    }

    #[test]
    fn likelihoods() {
        let g = PersuasionGame::example();
        let lik = message_likelihoods(&bll_device(0.9).unwrap(), &g);
        assert!((lik[0][0] - 0.3).abs() < 1e-12 && (lik[1][0] - 0.05).abs() < 1e-12);
        let lik = message_likelihoods(&bll_device(0.6).unwrap(), &g);
        for row in &lik {
            assert!((row[0] - 0.2).abs() < 1e-12 && (row[1] - 0.2).abs() < 1e-12 && (row[2] - 0.6).abs() < 1e-12);
        }
        assert!(is_uniform_likelihood(&bll_device(0.6).unwrap(), &g));
        assert!(!is_uniform_likelihood(&bll_device(0.9).unwrap(), &g));
    }

    #[test]
    fn joint_vertex() {
        let g = PersuasionGame::example();
        let c = device_prior_set(&g, &bll_device(0.9).unwrap()).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.vertices().iter().any(|v| (v.probs()[0] - 0.3).abs() < 1e-12));
    }

    #[test]
    fn receiver_play() {
        let g = PersuasionGame::example();
        let fb = receiver_response(&g, &bll_device(0.4).unwrap(), &UpdateRule::FullBayes).unwrap();
        assert_eq!(names(&g, &fb), ["am", "am", "ah"]);
        let r = receiver_response(&g, &bll_device(0.9).unwrap(), &UpdateRule::Rml(0.1)).unwrap();
        assert_eq!(g.actions[r[0].unwrap()], "al");
    }

    #[test]
    fn values() {
        let g = PersuasionGame::example();
        let v = sender_value(&g, &bll_device(0.6).unwrap(), &UpdateRule::Rml(0.3)).unwrap();
        assert!((v - 0.6).abs() < 1e-12);
        let v = sender_value(&g, &bll_device(0.9).unwrap(), &UpdateRule::Rml(0.1)).unwrap();
        assert!((v - 0.3).abs() < 1e-12);
        let v = sender_value(&g, &bll_device(0.0).unwrap(), &UpdateRule::FullBayes).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn concavification() {
        let g = PersuasionGame::example();
        assert!((bayesian_optimum(&g, 10_000).unwrap() - 0.5).abs() < 1e-3);
        let sure = PersuasionGame { prior: Prior::new(vec![0.0, 1.0]).unwrap(), ..g.clone() };
        assert!((bayesian_optimum(&sure, 100).unwrap() - 1.0).abs() < 1e-12);
        let three = PersuasionGame {
            states: StateSpace::indexed(3).unwrap(),
            prior: Prior::uniform(3),
            actions: vec!["a".into()],
            sender_payoff: vec![vec![0.0; 3]],
            receiver_payoff: vec![vec![0.0; 3]],
        };
        assert_eq!(bayesian_optimum(&three, 10), Err(Error::NotTwoStates(3)));
    }
}
