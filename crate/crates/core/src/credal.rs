//! Credal sets in vertex representation.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::in_convex_hull;
use crate::prior::{Act, Prior};
use crate::space::Event;

/// Default geometric tolerance for face membership and hull redundancy.
pub const TAU_GEOM: f64 = 1e-9;

/// Convex hull of finitely many priors, stored as its minimal vertex list in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredalSet {
    vertices: Vec<Prior>,
    tol: f64,
}

/// Minimal vertex representation of the hull of `points`, using [`TAU_GEOM`].
pub fn hull_reduce(points: Vec<Prior>) -> Result<CredalSet> {
    hull_reduce_with_tol(points, TAU_GEOM)
}

/// Minimal vertex representation of the hull of `points`.
pub fn hull_reduce_with_tol(points: Vec<Prior>, tol: f64) -> Result<CredalSet> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = points[0].len();
    if let Some(bad) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
    }

    let mut uniq: Vec<Prior> = Vec::with_capacity(points.len());
    for p in points {
        if !uniq.iter().any(|q| q.max_abs_diff(&p) <= tol) {
            uniq.push(p);
        }
    }

    let mut keep = vec![true; uniq.len()];
    if uniq.len() > 1 {
        for i in 0..uniq.len() {
            let others: Vec<&[f64]> =
                uniq.iter().enumerate().filter(|&(j, _)| j != i && keep[j]).map(|(_, q)| q.probs()).collect();
            if in_convex_hull(&others, uniq[i].probs(), tol) {
                keep[i] = false;
            }
        }
    }
    let mut vertices: Vec<Prior> = uniq.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect();
    vertices.sort_by(lex_cmp);
    Ok(CredalSet { vertices, tol })
}

fn lex_cmp(a: &Prior, b: &Prior) -> Ordering {
    for (x, y) in a.probs().iter().zip(b.probs()) {
        let kx = (x * 1e9).round();
        let ky = (y * 1e9).round();
        match kx.partial_cmp(&ky) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

impl CredalSet {
    pub fn new(points: Vec<Prior>) -> Result<Self> {
        hull_reduce(points)
    }

    /// Parses raw probability vectors and hull-reduces them.
    pub fn from_vecs(points: Vec<Vec<f64>>) -> Result<Self> {
        let priors = points.into_iter().map(Prior::new).collect::<Result<Vec<_>>>()?;
        hull_reduce(priors)
    }

    pub fn singleton(p: Prior) -> Self {
        Self { vertices: vec![p], tol: TAU_GEOM }
    }

    /// Same hull, re-reduced under a different tolerance.
    pub fn with_tol(self, tol: f64) -> Self {
        hull_reduce_with_tol(self.vertices, tol).expect("nonempty by construction")
    }

    pub fn vertices(&self) -> &[Prior] {
        &self.vertices
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn n_states(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub(crate) fn reduce(&self, points: Vec<Prior>) -> Result<CredalSet> {
        hull_reduce_with_tol(points, self.tol)
    }

    pub(crate) fn check_event(&self, event: &Event) -> Result<()> {
        if event.n_states() != self.n_states() {
            return Err(Error::DimensionMismatch { expected: self.n_states(), got: event.n_states() });
        }
        Ok(())
    }

    pub(crate) fn check_act(&self, f: &Act) -> Result<()> {
        if f.len() != self.n_states() {
            return Err(Error::DimensionMismatch { expected: self.n_states(), got: f.len() });
        }
        Ok(())
    }

    /// Whether `p` lies in the hull.
    pub fn contains(&self, p: &Prior) -> bool {
        let pts: Vec<&[f64]> = self.vertices.iter().map(Prior::probs).collect();
        in_convex_hull(&pts, p.probs(), self.tol.max(TAU_GEOM))
    }

    pub fn is_subset_of(&self, other: &CredalSet) -> bool {
        self.vertices.iter().all(|v| other.contains(v))
    }

    /// Set equality by two-sided membership.
    pub fn same_set(&self, other: &CredalSet) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    /// Vertex lists match one-to-one within `tol` in max norm.
    pub fn approx_eq(&self, other: &CredalSet, tol: f64) -> bool {
        let covered = |a: &CredalSet, b: &CredalSet| {
            a.vertices.iter().all(|v| b.vertices.iter().any(|w| v.max_abs_diff(w) <= tol))
        };
        self.len() == other.len() && covered(self, other) && covered(other, self)
    }
}

/// Smallest and largest probability the set gives `event`.
pub fn event_prob_bounds(c: &CredalSet, event: &Event) -> (f64, f64) {
    c.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let p = v.prob(event);
        (lo.min(p), hi.max(p))
    })
}

/// The face of vertices that maximize the probability of `event`.
pub fn max_likelihood_face(c: &CredalSet, event: &Event) -> CredalSet {
    let (_, hi) = event_prob_bounds(c, event);
    let vertices = c.vertices.iter().filter(|v| v.prob(event) >= hi - c.tol).cloned().collect();
    CredalSet { vertices, tol: c.tol }
}

/// `alpha * C*(E) + (1 - alpha) * C`.
pub fn contract(c: &CredalSet, event: &Event, alpha: f64) -> Result<CredalSet> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::BadAlpha(alpha));
    }
    c.check_event(event)?;
    let face = max_likelihood_face(c, event);
    let mut pts = Vec::with_capacity(face.len() * c.len());
    for p in face.vertices() {
        for q in c.vertices() {
            pts.push(p.mix(q, alpha));
        }
    }
    c.reduce(pts)
}

/// Maxmin expected utility of `f`.
pub fn meu_value(c: &CredalSet, f: &Act) -> f64 {
    c.vertices.iter().map(|v| v.expect(f)).fold(f64::INFINITY, f64::min)
}

/// Indices of the vertices attaining the MEU value within `tol`.
pub fn meu_minimizers(c: &CredalSet, f: &Act, tol: f64) -> Vec<usize> {
    let m = meu_value(c, f);
    c.vertices.iter().enumerate().filter(|(_, v)| v.expect(f) <= m + tol).map(|(i, _)| i).collect()
}
