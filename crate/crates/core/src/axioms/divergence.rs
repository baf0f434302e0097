//! Whether any likelihood-ratio cut reproduces a relative maximum
//! likelihood posterior set.

use crate::credal::{event_prob_bounds, CredalSet};
use crate::error::Result;
use crate::space::Event;
use crate::update::{update, UpdateRule};

/// The cut level whose minimal retained likelihood matches that of the
/// contraction with weight `alpha`.
pub fn matching_cut_level(c: &CredalSet, event: &Event, alpha: f64) -> f64 {
    let (lo, hi) = event_prob_bounds(c, event);
    (alpha * hi + (1.0 - alpha) * lo) / hi
}

/// True when no threshold on an evenly spaced grid of `grid` points in
/// `[0, 1]`, nor the matching cut level, yields the same posterior set as
/// RML with weight `alpha`.
pub fn rml_vs_lr_divergence(c: &CredalSet, event: &Event, alpha: f64, grid: usize) -> Result<bool> {
    let rml = update(c, event, &UpdateRule::Rml(alpha))?;
    let mut levels: Vec<f64> = match grid {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..grid).map(|k| k as f64 / (grid - 1) as f64).collect(),
    };
    levels.push(matching_cut_level(c, event, alpha).clamp(0.0, 1.0));
    for lambda in levels {
        let lr = update(c, event, &UpdateRule::LikelihoodRatio(lambda))?;
        if lr.same_set(&rml) {
            return Ok(false);
        }
    }
    Ok(true)
}
