//! Thresholds for sufficiently good consequences and calibration of the
//! contraction weight from conditional certainty equivalents.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::credal::{event_prob_bounds, max_likelihood_face, meu_value, CredalSet};
use crate::error::{Error, Result};
use crate::prior::{splice_const, Act, Prior, TAU_NORM};
use crate::space::Event;
use crate::update::{conditional_ce, update, UpdateRule};

/// Level of the off-event consequence above which the MEU minimizer of
/// `f_E x` lies in the maximum-likelihood face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub value: f64,
    /// Vertex of `C` (by index) with the largest ratio, when any vertex lies
    /// off the face.
    pub binding_vertex: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    pub unique: bool,
    pub undershoot: f64,
    pub overshoot: f64,
}

fn integral_on(p: &Prior, f: &Act, event: &Event) -> f64 {
    event.members().map(|i| p.probs()[i] * f.utils()[i]).sum()
}

fn require_strict_nonnull(c: &CredalSet, event: &Event) -> Result<(f64, f64)> {
    c.check_event(event)?;
    let (lo, hi) = event_prob_bounds(c, event);
    if lo <= TAU_NORM {
        return Err(Error::NotStrictNonnull { lo, hi });
    }
    Ok((lo, hi))
}

/// Ratios `(A(q*) - A(p)) / (q*(E) - p(E))` for each vertex `p` off the
/// face, where `A` integrates `f` over the event and `q*` minimizes `A` on
/// the face.
fn vertex_ratios(c: &CredalSet, event: &Event, f: &Act) -> Vec<(usize, f64)> {
    let (_, hi) = event_prob_bounds(c, event);
    let on_face = |p: &Prior| p.prob(event) >= hi - c.tol();
    let q_star = c
        .vertices()
        .iter()
        .filter(|p| on_face(p))
        .min_by(|a, b| integral_on(a, f, event).total_cmp(&integral_on(b, f, event)))
        .expect("face is nonempty");
    let a_q = integral_on(q_star, f, event);
    let q_e = q_star.prob(event);
    c.vertices()
        .iter()
        .enumerate()
        .filter(|(_, p)| !on_face(p))
        .map(|(i, p)| (i, (a_q - integral_on(p, f, event)) / (q_e - p.prob(event))))
        .collect()
}

/// Whether the MEU value of `act` over `C` is attained on the
/// maximum-likelihood face of `event`.
pub fn minimizer_in_face(c: &CredalSet, event: &Event, act: &Act, tol: f64) -> bool {
    let face = max_likelihood_face(c, event);
    meu_value(c, act) >= meu_value(&face, act) - tol
}

pub fn sufficiently_good_threshold(c: &CredalSet, event: &Event, f: &Act) -> Result<ThresholdResult> {
    require_strict_nonnull(c, event)?;
    c.check_act(f)?;
    let ml = conditional_ce(c, event, &UpdateRule::MaxLikelihood, f)?;
    let ratios = vertex_ratios(c, event, f);
    let binding = ratios.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1));
    let value = binding.map_or(ml, |(_, r)| r.max(ml));
    Ok(ThresholdResult { value, binding_vertex: binding.map(|(i, _)| i) })
}

fn check_bounds(f: &Act, lo: f64, hi: f64) -> Result<()> {
    if let Some(u) = f.utils().iter().find(|&&u| u < lo - TAU_NORM || u > hi + TAU_NORM) {
        return Err(Error::BadBounds(format!("utility {u} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// Smallest `K >= 1` such that `(f / K)_E u_max` is MEU-minimized on the face.
pub fn shrink_threshold(c: &CredalSet, event: &Event, f: &Act, u_max: f64) -> Result<f64> {
    if !(u_max > 0.0 && u_max.is_finite()) {
        return Err(Error::BadBounds(format!("upper bound {u_max} must be positive")));
    }
    require_strict_nonnull(c, event)?;
    c.check_act(f)?;
    check_bounds(f, 0.0, u_max)?;
    let worst = vertex_ratios(c, event, f).into_iter().map(|(_, r)| r).fold(f64::NEG_INFINITY, f64::max);
    let k = (worst / u_max).max(1.0);
    if !k.is_finite() {
        return Err(Error::Unbounded);
    }
    Ok(k)
}

/// Largest `lambda` in `(0, 1]` such that the act paying
/// `lambda f + (1 - lambda) u_min` on the event and `u_max` off it is
/// MEU-minimized on the face.
pub fn mix_threshold(c: &CredalSet, event: &Event, f: &Act, u_min: f64, u_max: f64) -> Result<f64> {
    if u_min.is_nan() || u_max.is_nan() || u_min >= u_max {
        return Err(Error::BadBounds(format!("need {u_min} < {u_max}")));
    }
    require_strict_nonnull(c, event)?;
    c.check_act(f)?;
    check_bounds(f, u_min, u_max)?;
    Ok(vertex_ratios(c, event, f)
        .into_iter()
        .filter(|&(_, r)| r > u_max)
        .map(|(_, r)| (u_max - u_min) / (r - u_min))
        .fold(1.0, f64::min))
}

/// Recovers the contraction weight that rationalizes `cond_value` as the
/// conditional certainty equivalent of `f` given the event.
pub fn alpha_from_preference(c: &CredalSet, event: &Event, f: &Act, cond_value: f64) -> Result<AlphaEstimate> {
    let threshold = sufficiently_good_threshold(c, event, f)?;
    let x = cond_value;
    let x_star = threshold.value.max(x) + 1.0;
    let undershoot = x - meu_value(c, &splice_const(f, event, x));
    let overshoot = meu_value(c, &splice_const(f, event, x_star))
        - meu_value(c, &splice_const(&Act::constant(f.len(), x), event, x_star));

    let scale = 1.0 + x.abs() + x_star.abs() + f.utils().iter().fold(0.0f64, |m, u| m.max(u.abs()));
    let tau = 1e-9 * scale;
    if undershoot < -tau || overshoot < -tau {
        return Err(Error::InconsistentData { undershoot, overshoot });
    }
    let undershoot = undershoot.max(0.0);
    let overshoot = overshoot.max(0.0);
    let unique = undershoot + overshoot > c.tol();
    let alpha = if unique { (undershoot / (undershoot + overshoot)).clamp(0.0, 1.0) } else { 0.0 };
    Ok(AlphaEstimate { alpha, unique, undershoot, overshoot })
}

/// An act whose full Bayesian conditional value is strictly below its
/// maximum-likelihood one, or `None` when the two rules agree on every act.
///
/// The act is the direction from a full Bayesian posterior outside the
/// maximum-likelihood posterior set to its nearest point in that set.
pub fn separating_probe(c: &CredalSet, event: &Event) -> Result<Option<Act>> {
    let fb = update(c, event, &UpdateRule::FullBayes)?;
    let ml = update(c, event, &UpdateRule::MaxLikelihood)?;
    let mut best: Option<(f64, Act)> = None;
    for r in fb.vertices() {
        if ml.contains(r) {
            continue;
        }
        let s = nearest_point(ml.vertices(), r.probs());
        let dir: Vec<f64> = s.iter().zip(r.probs()).map(|(a, b)| a - b).collect();
        let gap: f64 = dir.iter().map(|d| d * d).sum();
        if best.as_ref().is_none_or(|(g, _)| gap > *g) {
            best = Some((gap, Act::from_raw(dir)));
        }
    }
    Ok(best.map(|(_, f)| f))
}

/// Euclidean projection of `target` onto the hull of `points`, by trying
/// every affinely independent subset small enough to carry the minimizer.
fn nearest_point(points: &[Prior], target: &[f64]) -> Vec<f64> {
    let dim = target.len();
    let m = points.len();
    let max_k = m.min(dim);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut subset = Vec::new();
    for k in 1..=max_k {
        subsets(m, k, 0, &mut subset, &mut |idx| {
            let Some(w) = affine_projection_weights(points, idx, target) else { return };
            if w.iter().any(|&x| x < -1e-12) {
                return;
            }
            let mut y = vec![0.0; dim];
            for (&i, wi) in idx.iter().zip(&w) {
                for (yj, pj) in y.iter_mut().zip(points[i].probs()) {
                    *yj += wi * pj;
                }
            }
            let d: f64 = y.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, y));
            }
        });
    }
    best.expect("single points are always feasible").1
}

fn subsets(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        visit(cur);
        return;
    }
    for i in start..m {
        cur.push(i);
        subsets(m, k, i + 1, cur, visit);
        cur.pop();
    }
}

fn affine_projection_weights(points: &[Prior], idx: &[usize], target: &[f64]) -> Option<Vec<f64>> {
    let k = idx.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut kkt = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut rhs = DVector::<f64>::zeros(k + 1);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            kkt[(a, b)] = dot(points[i].probs(), points[j].probs());
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
        rhs[a] = dot(points[i].probs(), target);
    }
    rhs[k] = 1.0;
    let sol = kkt.lu().solve(&rhs)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(sol.iter().take(k).copied().collect())
}
