//! Act pairs built to satisfy the premises of DC-CS and EC exactly, so the
//! implication is exercised rather than vacuously true.

use serde::Serialize;

use crate::credal::{event_prob_bounds, meu_value, CredalSet};
use crate::error::{Error, Result};
use crate::prior::{splice_const, Act, TAU_NORM};
use crate::refinement::{alpha_from_preference, sufficiently_good_threshold};
use crate::space::Event;
use crate::update::{conditional_ce, UpdateRule};

/// A pair `(f, g)` meeting both DC-CS premises at the conditional value `x`
/// of `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcCsPair {
    pub f: Act,
    pub g: Act,
    pub x: f64,
    /// Weight on the original `g`; the rest goes to the constant `y`.
    pub lambda: f64,
    pub y: f64,
    pub threshold: f64,
    /// `|U(f_E x) - U(g_E x)|`.
    pub residual_cond: f64,
    /// `|U(f_E t) - U(g_E t)|` at the joint threshold `t`.
    pub residual_good: f64,
}

/// A pair `(f, g)` meeting both EC premises across two events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcPair {
    pub f: Act,
    pub g: Act,
    pub x: f64,
    pub x1_star: f64,
    pub x2_star: f64,
    pub lambda: f64,
    pub y: f64,
    pub residual_cond: f64,
    pub residual_good: f64,
    /// `|U(x_E1 x1*) - U(x_E2 x2*)|`.
    pub residual_calibration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Construction<T> {
    Pair(T),
    /// `g` is valued identically by full Bayesian and maximum likelihood
    /// updating, so no mixture with a constant can move it.
    Degenerate,
}

impl<T> Construction<T> {
    pub fn pair(self) -> Option<T> {
        match self {
            Construction::Pair(p) => Some(p),
            Construction::Degenerate => None,
        }
    }
}

fn strict_bounds(c: &CredalSet, event: &Event) -> Result<(f64, f64)> {
    c.check_event(event)?;
    let (lo, hi) = event_prob_bounds(c, event);
    if lo <= TAU_NORM {
        return Err(Error::NotStrictNonnull { lo, hi });
    }
    Ok((lo, hi))
}

/// Affine image of `f` with range `[0, eps]`.
pub(crate) fn rescale(f: &Act, eps: f64) -> Act {
    let lo = f.utils().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = f.utils().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if span <= 0.0 {
        return Act::constant(f.len(), 0.0);
    }
    Act::from_raw(f.utils().iter().map(|u| eps * (u - lo) / span).collect())
}

fn integral_on(p: &crate::prior::Prior, g: &Act, event: &Event) -> f64 {
    event.members().map(|i| p.probs()[i] * g.utils()[i]).sum()
}

/// `min_p (int_E g dp - p(E) * ml)`, negative exactly when some prior's
/// posterior values `g` below its maximum-likelihood value `ml`.
fn most_negative_gap(c: &CredalSet, event: &Event, g: &Act, ml: f64) -> f64 {
    c.vertices().iter().map(|p| integral_on(p, g, event) - p.prob(event) * ml).fold(f64::INFINITY, f64::min)
}

/// `U((lambda g + (1 - lambda) y)_E x)` with `y` chosen so the mixture's
/// maximum-likelihood value equals `target`, written so it stays finite at
/// `lambda = 1`.
fn mixed_value(c: &CredalSet, event: &Event, g: &Act, ml_g: f64, target: f64, x: f64, lambda: f64) -> f64 {
    c.vertices()
        .iter()
        .map(|p| {
            let pe = p.prob(event);
            lambda * integral_on(p, g, event) + pe * (target - lambda * ml_g) + (1.0 - pe) * x
        })
        .fold(f64::INFINITY, f64::min)
}

/// Root of the nondecreasing-gap function `h` on `[0, 1]` given
/// `h(0) >= 0 > h(1)`.
fn bisect_unit(mut h: impl FnMut(f64) -> f64) -> f64 {
    let (mut a, mut b) = (0.0f64, 1.0f64);
    if h(a) <= 0.0 {
        return a;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if h(m) >= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    a
}

struct Mixed {
    g: Act,
    lambda: f64,
    y: f64,
}

/// Solves for the mixture of `g` with a constant whose maximum-likelihood
/// value on `event` is `target` and whose value spliced with `x` is `lhs`.
fn solve_mixture(c: &CredalSet, event: &Event, g: &Act, target: f64, x: f64, lhs: f64) -> Result<Mixed> {
    let ml_g = conditional_ce(c, event, &UpdateRule::MaxLikelihood, g)?;
    let r = |l: f64| mixed_value(c, event, g, ml_g, target, x, l) - lhs;
    let scale = 1e-12 * (1.0 + lhs.abs() + target.abs() + x.abs());
    let (r0, r1) = (r(0.0), r(1.0));
    if r0 < -scale || r1 >= 0.0 {
        return Err(Error::RootBracketFailure(format!("R(0) - lhs = {r0}, R(1) - lhs = {r1}")));
    }
    let lambda = bisect_unit(r);
    let y = (target - lambda * ml_g) / (1.0 - lambda);
    Ok(Mixed { g: g.mix_const(y, lambda), lambda, y })
}

/// Builds `(f_eps, lambda g + (1 - lambda) y)` meeting both DC-CS premises,
/// where `f_eps` is `f` rescaled into `[0, eps]` and `x` is its conditional
/// value under `rule`.
///
/// With `eps` unset, half the largest admissible value is used.
pub fn construct_dc_cs_pair(
    c: &CredalSet,
    event: &Event,
    f: &Act,
    g: &Act,
    rule: &UpdateRule,
    eps: Option<f64>,
) -> Result<Construction<DcCsPair>> {
    strict_bounds(c, event)?;
    c.check_act(f)?;
    c.check_act(g)?;
    let fb_g = conditional_ce(c, event, &UpdateRule::FullBayes, g)?;
    let ml_g = conditional_ce(c, event, &UpdateRule::MaxLikelihood, g)?;
    if ml_g - fb_g <= c.tol() * (1.0 + ml_g.abs()) {
        return Ok(Construction::Degenerate);
    }
    let neg = most_negative_gap(c, event, g, ml_g);
    let eps = eps.unwrap_or(-neg / 2.0);
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::BadBounds(format!("rescaling width {eps} must be positive")));
    }

    let f_eps = rescale(f, eps);
    let x = conditional_ce(c, event, rule, &f_eps)?;
    if !alpha_from_preference(c, event, &f_eps, x)?.unique {
        return Err(Error::NotUnique);
    }
    let target = conditional_ce(c, event, &UpdateRule::MaxLikelihood, &f_eps)?;
    let lhs = meu_value(c, &splice_const(&f_eps, event, x));
    let mixed = solve_mixture(c, event, g, target, x, lhs)?;

    let t = sufficiently_good_threshold(c, event, &f_eps)?
        .value
        .max(sufficiently_good_threshold(c, event, &mixed.g)?.value);
    let residual_cond = (lhs - meu_value(c, &splice_const(&mixed.g, event, x))).abs();
    let residual_good =
        (meu_value(c, &splice_const(&f_eps, event, t)) - meu_value(c, &splice_const(&mixed.g, event, t))).abs();
    Ok(Construction::Pair(DcCsPair {
        f: f_eps,
        g: mixed.g,
        x,
        lambda: mixed.lambda,
        y: mixed.y,
        threshold: t,
        residual_cond,
        residual_good,
    }))
}

/// Consequences `x1*, x2* >= t` with `hi1 x + (1 - hi1) x1* = hi2 x + (1 - hi2) x2*`,
/// the smaller of the two pinned at `t`.
pub(crate) fn calibrated_good_consequences(x: f64, t: f64, hi1: f64, hi2: f64) -> Option<(f64, f64)> {
    let (m1, m2) = (1.0 - hi1, 1.0 - hi2);
    let pair = if m1 <= TAU_NORM && m2 <= TAU_NORM {
        (t, t)
    } else if m2 > TAU_NORM && x + m1 * (t - x) / m2 >= t {
        (t, x + m1 * (t - x) / m2)
    } else if m1 > TAU_NORM {
        (x + m2 * (t - x) / m1, t)
    } else {
        return None;
    };
    (pair.0 >= t && pair.1 >= t).then_some(pair)
}

/// Builds `(f_eps, lambda g + (1 - lambda) y)` meeting both EC premises for
/// the events `e1` (of `f`) and `e2` (of `g`), together with the calibrated
/// good consequences `x1*`, `x2*`.
pub fn construct_ec_pair(
    c: &CredalSet,
    e1: &Event,
    e2: &Event,
    f: &Act,
    g: &Act,
    rule: &UpdateRule,
    eps: Option<f64>,
) -> Result<Construction<EcPair>> {
    let (_, hi1) = strict_bounds(c, e1)?;
    let (_, hi2) = strict_bounds(c, e2)?;
    c.check_act(f)?;
    c.check_act(g)?;
    let fb_g = conditional_ce(c, e2, &UpdateRule::FullBayes, g)?;
    let ml_g = conditional_ce(c, e2, &UpdateRule::MaxLikelihood, g)?;
    if ml_g - fb_g <= c.tol() * (1.0 + ml_g.abs()) {
        return Ok(Construction::Degenerate);
    }
    let neg = most_negative_gap(c, e2, g, ml_g);
    let eps = eps.unwrap_or(-neg / (2.0 * (1.0 + hi1 / hi2)));
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::BadBounds(format!("rescaling width {eps} must be positive")));
    }

    let f_eps = rescale(f, eps);
    let x = conditional_ce(c, e1, rule, &f_eps)?;
    let ml_f = conditional_ce(c, e1, &UpdateRule::MaxLikelihood, &f_eps)?;
    let target = x + hi1 / hi2 * (ml_f - x);
    let lhs = meu_value(c, &splice_const(&f_eps, e1, x));
    let mixed = solve_mixture(c, e2, g, target, x, lhs)?;

    let t = [
        sufficiently_good_threshold(c, e1, &f_eps)?.value,
        sufficiently_good_threshold(c, e1, &mixed.g)?.value,
        sufficiently_good_threshold(c, e2, &f_eps)?.value,
        sufficiently_good_threshold(c, e2, &mixed.g)?.value,
    ]
    .into_iter()
    .fold(x, f64::max);

    let Some((x1_star, x2_star)) = calibrated_good_consequences(x, t, hi1, hi2) else {
        return Ok(Construction::Degenerate);
    };

    let unit = Act::constant(c.n_states(), x);
    let residual_cond = (lhs - meu_value(c, &splice_const(&mixed.g, e2, x))).abs();
    let residual_good =
        (meu_value(c, &splice_const(&f_eps, e1, x1_star)) - meu_value(c, &splice_const(&mixed.g, e2, x2_star))).abs();
    let residual_calibration =
        (meu_value(c, &splice_const(&unit, e1, x1_star)) - meu_value(c, &splice_const(&unit, e2, x2_star))).abs();
    Ok(Construction::Pair(EcPair {
        f: f_eps,
        g: mixed.g,
        x,
        x1_star,
        x2_star,
        lambda: mixed.lambda,
        y: mixed.y,
        residual_cond,
        residual_good,
        residual_calibration,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_state() -> CredalSet {
        CredalSet::from_vecs(vec![vec![0.5, 0.0, 0.5], vec![0.0, 0.5, 0.5], vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]])
            .unwrap()
    }

    fn e12() -> Event {
        Event::new(3, &[0, 1]).unwrap()
    }

    fn act(v: &[f64]) -> Act {
        Act::new(v.to_vec()).unwrap()
    }

    #[test]
    fn three_state_pair_meets_premises() {
        let c = three_state();
        let rule = UpdateRule::Rml(0.4);
        let pair = construct_dc_cs_pair(&c, &e12(), &act(&[1.0, 0.0, 0.0]), &act(&[0.0, 1.0, 0.0]), &rule, None)
            .unwrap()
            .pair()
            .unwrap();
        assert!(pair.residual_cond < 1e-8, "{pair:?}");
        assert!(pair.residual_good < 1e-8, "{pair:?}");
        assert!(pair.lambda > 0.0 && pair.lambda < 1.0);
        let cf = conditional_ce(&c, &e12(), &rule, &pair.f).unwrap();
        let cg = conditional_ce(&c, &e12(), &rule, &pair.g).unwrap();
        assert!((cf - cg).abs() < 1e-9);
    }

    #[test]
    fn constant_g_is_degenerate() {
        let c = three_state();
        let out = construct_dc_cs_pair(
            &c,
            &e12(),
            &act(&[1.0, 0.0, 0.0]),
            &act(&[2.0, 2.0, 2.0]),
            &UpdateRule::FullBayes,
            None,
        )
        .unwrap();
        assert_eq!(out, Construction::Degenerate);
    }

    #[test]
    fn constant_mixture_of_f_keeps_alpha() {
        let c = three_state();
        let f = act(&[1.0, 0.0, 0.0]);
        let g = f.mix_const(3.0, 0.5);
        let rule = UpdateRule::Rml(0.7);
        let pair = construct_dc_cs_pair(&c, &e12(), &f, &g, &rule, None).unwrap().pair().unwrap();
        let xf = conditional_ce(&c, &e12(), &rule, &pair.f).unwrap();
        let xg = conditional_ce(&c, &e12(), &rule, &pair.g).unwrap();
        let af = alpha_from_preference(&c, &e12(), &pair.f, xf).unwrap();
        let ag = alpha_from_preference(&c, &e12(), &pair.g, xg).unwrap();
        assert!((af.alpha - 0.7).abs() < 1e-6 && (ag.alpha - 0.7).abs() < 1e-6);
    }

    #[test]
    fn ec_pair_on_two_events() {
        let c =
            CredalSet::from_vecs(vec![vec![0.5, 0.1, 0.2, 0.2], vec![0.1, 0.4, 0.3, 0.2], vec![0.25, 0.25, 0.1, 0.4]])
                .unwrap();
        let e1 = Event::new(4, &[0, 1]).unwrap();
        let e2 = Event::new(4, &[1, 2]).unwrap();
        let rule = UpdateRule::Rml(0.3);
        let pair =
            construct_ec_pair(&c, &e1, &e2, &act(&[1.0, 0.0, 2.0, 0.5]), &act(&[0.0, 3.0, 1.0, 0.0]), &rule, None)
                .unwrap()
                .pair()
                .unwrap();
        assert!(pair.residual_cond < 1e-8 && pair.residual_good < 1e-8 && pair.residual_calibration < 1e-8, "{pair:?}");
        let cg = conditional_ce(&c, &e2, &rule, &pair.g).unwrap();
        assert!((cg - pair.x).abs() < 1e-9);
    }
}
