//! Updating rules for credal sets.

use std::collections::BTreeMap;
use std::fmt;

use crate::credal::{contract, event_prob_bounds, max_likelihood_face, meu_value, CredalSet};
use crate::error::{Error, Result};
use crate::prior::{bayes_update, Act, Prior, TAU_NORM};
use crate::space::Event;

/// How a credal set is revised after an event is observed.
#[derive(Debug, Clone, PartialEq)]
pub enum UpdateRule {
    /// Bayes-update every prior.
    FullBayes,
    /// Bayes-update only the priors maximizing the event's probability.
    MaxLikelihood,
    /// Bayes-update the contraction of the set toward its maximum-likelihood face.
    Rml(f64),
    /// [`UpdateRule::Rml`] with a contraction weight chosen per event.
    ContingentRml(BTreeMap<Event, f64>),
    /// Bayes-update the priors with `p(E) >= lambda * max p(E)`.
    LikelihoodRatio(f64),
}

impl UpdateRule {
    /// The contraction weight this rule applies to `event`, when it has one.
    pub fn alpha_for(&self, event: &Event) -> Result<Option<f64>> {
        match self {
            UpdateRule::FullBayes => Ok(Some(0.0)),
            UpdateRule::MaxLikelihood => Ok(Some(1.0)),
            UpdateRule::Rml(a) => Ok(Some(*a)),
            UpdateRule::ContingentRml(map) => map.get(event).copied().map(Some).ok_or(Error::MissingAlpha),
            UpdateRule::LikelihoodRatio(_) => Ok(None),
        }
    }

    fn needs_strict_nonnull(&self) -> bool {
        matches!(self, UpdateRule::FullBayes | UpdateRule::Rml(_) | UpdateRule::ContingentRml(_))
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateRule::FullBayes => write!(f, "FB"),
            UpdateRule::MaxLikelihood => write!(f, "ML"),
            UpdateRule::Rml(a) => write!(f, "RML({a})"),
            UpdateRule::ContingentRml(map) => {
                let parts: Vec<String> = map.iter().map(|(e, a)| format!("{e}:{a}")).collect();
                write!(f, "ContingentRML[{}]", parts.join(";"))
            }
            UpdateRule::LikelihoodRatio(l) => write!(f, "LR({l})"),
        }
    }
}

/// Priors kept by `rule` before conditioning, as a credal set.
pub fn retained_set(c: &CredalSet, event: &Event, rule: &UpdateRule) -> Result<CredalSet> {
    c.check_event(event)?;
    let (lo, hi) = event_prob_bounds(c, event);
    if rule.needs_strict_nonnull() && lo <= TAU_NORM {
        return Err(Error::NotStrictNonnull { lo, hi });
    }
    if hi <= TAU_NORM {
        return Err(Error::NotStrictNonnull { lo, hi });
    }
    match rule {
        UpdateRule::FullBayes => Ok(c.clone()),
        UpdateRule::MaxLikelihood => Ok(max_likelihood_face(c, event)),
        UpdateRule::Rml(a) => contract(c, event, *a),
        UpdateRule::ContingentRml(_) => {
            let a = rule.alpha_for(event)?.expect("contingent rule has an alpha");
            contract(c, event, a)
        }
        UpdateRule::LikelihoodRatio(l) => {
            if !(0.0..=1.0).contains(l) {
                return Err(Error::BadThreshold(*l));
            }
            likelihood_cut(c, event, l * hi)
        }
    }
}

/// `{p in C : p(E) >= level}` for a level no larger than the maximum.
///
/// Vertices of the cut are the original vertices on the kept side together
/// with the points where segments between kept and dropped vertices cross
/// the level. Segments that are not edges cross inside the cut, so the hull
/// reduction discards them.
fn likelihood_cut(c: &CredalSet, event: &Event, level: f64) -> Result<CredalSet> {
    let tol = c.tol();
    let probs: Vec<f64> = c.vertices().iter().map(|v| v.prob(event)).collect();
    let mut pts: Vec<Prior> = Vec::new();
    for (v, &pv) in c.vertices().iter().zip(&probs) {
        if pv >= level - tol {
            pts.push(v.clone());
        }
    }
    for (i, a) in c.vertices().iter().enumerate() {
        for (j, b) in c.vertices().iter().enumerate() {
            let (pa, pb) = (probs[i], probs[j]);
            if pa > level + tol && pb < level - tol {
                let t = (pa - level) / (pa - pb);
                pts.push(b.mix(a, t));
            }
        }
    }
    c.reduce(pts)
}

/// Posterior credal set after observing `event` under `rule`.
pub fn update(c: &CredalSet, event: &Event, rule: &UpdateRule) -> Result<CredalSet> {
    let kept = retained_set(c, event, rule)?;
    // zero-likelihood priors in a likelihood-ratio cut at level 0 add no
    // posterior beyond those of their positive-likelihood neighbours
    let posts = kept
        .vertices()
        .iter()
        .filter(|v| v.prob(event) > TAU_NORM)
        .map(|v| bayes_update(v, event))
        .collect::<Result<Vec<_>>>()?;
    c.reduce(posts)
}

/// Conditional certainty equivalent of `f` given `event` under `rule`.
pub fn conditional_ce(c: &CredalSet, event: &Event, rule: &UpdateRule, f: &Act) -> Result<f64> {
    c.check_act(f)?;
    Ok(meu_value(&update(c, event, rule)?, f))
}
