//! Executable checks of the behavioural axioms on sampled and constructed
//! acts.
//!
//! Every indifference is an equality of MEU values. A premise holds when its
//! residual is below [`TAU_AXIOM`]; a conclusion is violated when it misses
//! by more than ten times that.

mod construct;
mod divergence;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::credal::{event_prob_bounds, meu_value, CredalSet};
use crate::error::{Error, Result};
use crate::prior::{splice_const, Act, TAU_NORM};
use crate::refinement::{mix_threshold, shrink_threshold, sufficiently_good_threshold};
use crate::sampling::{corner_acts, random_act, rng};
use crate::space::Event;
use crate::update::{update, UpdateRule};

pub use construct::{construct_dc_cs_pair, construct_ec_pair, Construction, DcCsPair, EcPair};
pub use divergence::{matching_cut_level, rml_vs_lr_divergence};

pub const TAU_AXIOM: f64 = 1e-7;

const CONCLUSION_TOL: f64 = 10.0 * TAU_AXIOM;
const CORNER_LIMIT: usize = 6;
const APPROX_EPS: [f64; 4] = [1.0, 0.1, 0.01, 0.001];
const APPROX_OFFSETS: [f64; 4] = [0.0, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    Cr,
    Dc,
    CrC,
    CrB,
    CrS,
    CrSShrink,
    CrSMix,
    ApproxCrS,
    DcC,
    DcS,
    CrUo,
    DcCs,
    Ec,
}

impl Axiom {
    pub const ALL: [Axiom; 13] = [
        Axiom::Cr,
        Axiom::Dc,
        Axiom::CrC,
        Axiom::CrB,
        Axiom::CrS,
        Axiom::CrSShrink,
        Axiom::CrSMix,
        Axiom::ApproxCrS,
        Axiom::DcC,
        Axiom::DcS,
        Axiom::CrUo,
        Axiom::DcCs,
        Axiom::Ec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Cr => "CR",
            Axiom::Dc => "DC",
            Axiom::CrC => "CR-C",
            Axiom::CrB => "CR-B",
            Axiom::CrS => "CR-S",
            Axiom::CrSShrink => "CR-S'",
            Axiom::CrSMix => "CR-S''",
            Axiom::ApproxCrS => "APPROX-CR-S",
            Axiom::DcC => "DC-C",
            Axiom::DcS => "DC-S",
            Axiom::CrUo => "CR-UO",
            Axiom::DcCs => "DC-CS",
            Axiom::Ec => "EC",
        }
    }

    fn needs_bounded_box(self) -> bool {
        matches!(self, Axiom::CrB | Axiom::CrSShrink | Axiom::CrSMix)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', "-");
        let norm = match norm.as_str() {
            "APPROXIMATE-CR-S" | "APPROX-CRS" => "APPROX-CR-S".to_string(),
            "CR-S-PRIME" => "CR-S'".to_string(),
            "CR-S-DOUBLE-PRIME" => "CR-S''".to_string(),
            _ => norm,
        };
        Axiom::ALL.into_iter().find(|a| a.name() == norm).ok_or_else(|| Error::UnknownAxiom(s.to_string()))
    }
}

/// How acts are drawn. Utilities are uniform in `[lo, hi]`; with `bounded`
/// set, `hi` and `lo` double as the best and worst consequences and the
/// corner acts of the box are tested first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub constructed_pairs: usize,
    pub seed: u64,
    pub bounded: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { lo: 0.0, hi: 10.0, samples: 1000, constructed_pairs: 10, seed: 0, bounded: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub f: Vec<f64>,
    pub g: Option<Vec<f64>>,
    pub events: Vec<Vec<usize>>,
    pub x_values: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub passed: bool,
    pub samples_tested: usize,
    /// Cases whose premises held, so that the conclusion was checked.
    pub premises_met: usize,
    /// Premise-satisfying pairs that were built rather than sampled.
    pub constructed_pairs: usize,
    pub witness: Option<Witness>,
}

/// Checks `axiom` for the conditional preferences that `rule` derives from
/// the MEU preference over `c`, on every event in `events`.
pub fn check_axiom(
    axiom: Axiom,
    c: &CredalSet,
    rule: &UpdateRule,
    events: &[Event],
    cfg: &SamplerConfig,
) -> Result<AxiomReport> {
    if events.is_empty() {
        return Err(Error::EmptyInput);
    }
    if axiom.needs_bounded_box() && !(cfg.bounded && cfg.lo < cfg.hi) {
        return Err(Error::BoundedBoxRequired(axiom.name().to_string()));
    }
    if cfg.lo.is_nan() || cfg.hi.is_nan() || cfg.lo > cfg.hi {
        return Err(Error::BadBounds(format!("[{}, {}]", cfg.lo, cfg.hi)));
    }
    for e in events {
        c.check_event(e)?;
        let (lo, hi) = event_prob_bounds(c, e);
        if lo <= TAU_NORM {
            return Err(Error::NotStrictNonnull { lo, hi });
        }
    }

    let mut ck = Checker::new(c, rule, cfg);
    match axiom {
        Axiom::Ec => {
            let pairs: Vec<(Event, Event)> = if events.len() == 1 {
                vec![(events[0], events[0])]
            } else {
                events.iter().flat_map(|a| events.iter().filter(move |b| *b != a).map(move |b| (*a, *b))).collect()
            };
            for (k, (e1, e2)) in pairs.iter().enumerate() {
                ck.ec(e1, e2, k as u64)?;
            }
        }
        _ => {
            for (k, e) in events.iter().enumerate() {
                ck.single(axiom, e, k as u64)?;
            }
        }
    }
    Ok(AxiomReport {
        axiom: axiom.name().to_string(),
        passed: ck.witness.is_none(),
        samples_tested: ck.tested,
        premises_met: ck.premises_met,
        constructed_pairs: ck.constructed,
        witness: ck.witness,
    })
}

struct Checker<'a> {
    c: &'a CredalSet,
    rule: &'a UpdateRule,
    cfg: &'a SamplerConfig,
    posts: HashMap<Event, CredalSet>,
    tested: usize,
    premises_met: usize,
    constructed: usize,
    witness: Option<Witness>,
}

fn constant(n: usize, x: f64) -> Act {
    Act::constant(n, x)
}

impl<'a> Checker<'a> {
    fn new(c: &'a CredalSet, rule: &'a UpdateRule, cfg: &'a SamplerConfig) -> Self {
        Self { c, rule, cfg, posts: HashMap::new(), tested: 0, premises_met: 0, constructed: 0, witness: None }
    }

    fn n(&self) -> usize {
        self.c.n_states()
    }

    fn u(&self, act: &Act) -> f64 {
        meu_value(self.c, act)
    }

    /// `U(f_E x)`.
    fn u_sp(&self, f: &Act, e: &Event, x: f64) -> f64 {
        self.u(&splice_const(f, e, x))
    }

    /// `U(x_E y)`.
    fn u_cc(&self, x: f64, e: &Event, y: f64) -> f64 {
        self.u(&splice_const(&constant(self.n(), x), e, y))
    }

    fn ce(&mut self, e: &Event, f: &Act) -> Result<f64> {
        if !self.posts.contains_key(e) {
            let post = update(self.c, e, self.rule)?;
            self.posts.insert(*e, post);
        }
        Ok(meu_value(&self.posts[e], f))
    }

    fn ml_ce(&self, e: &Event, f: &Act) -> Result<f64> {
        crate::update::conditional_ce(self.c, e, &UpdateRule::MaxLikelihood, f)
    }

    fn threshold(&self, e: &Event, f: &Act) -> Result<f64> {
        Ok(sufficiently_good_threshold(self.c, e, f)?.value)
    }

    /// The corner acts of the box (when bounded and small) followed by
    /// uniform draws, `samples` in total.
    fn acts(&self, stream: u64) -> (Vec<Act>, Vec<Act>) {
        let n = self.n();
        let mut r = rng(self.cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream));
        let mut first = Vec::with_capacity(self.cfg.samples);
        if self.cfg.bounded && n <= CORNER_LIMIT {
            first.extend(corner_acts(n, self.cfg.lo, self.cfg.hi).into_iter().take(self.cfg.samples));
        }
        while first.len() < self.cfg.samples {
            first.push(random_act(&mut r, n, self.cfg.lo, self.cfg.hi));
        }
        let second = (0..self.cfg.samples).map(|_| random_act(&mut r, n, self.cfg.lo, self.cfg.hi)).collect();
        (first, second)
    }

    fn fail(&mut self, w: Witness) {
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }

    /// Records a checked equality `lhs = rhs`.
    #[allow(clippy::too_many_arguments)]
    fn expect_eq(
        &mut self,
        f: &Act,
        g: Option<&Act>,
        events: &[&Event],
        xs: Vec<f64>,
        lhs: f64,
        rhs: f64,
        detail: &str,
    ) {
        let margin = (lhs - rhs).abs();
        if margin > CONCLUSION_TOL {
            self.fail(Witness {
                f: f.utils().to_vec(),
                g: g.map(|g| g.utils().to_vec()),
                events: events.iter().map(|e| e.to_indices()).collect(),
                x_values: xs,
                lhs,
                rhs,
                margin,
                detail: detail.to_string(),
            });
        }
    }

    /// Records a checked inequality `lhs <= rhs` (strict when `strict`).
    #[allow(clippy::too_many_arguments)]
    fn expect_le(&mut self, f: &Act, events: &[&Event], xs: Vec<f64>, lhs: f64, rhs: f64, strict: bool, detail: &str) {
        let ok = if strict { lhs < rhs } else { lhs <= rhs + CONCLUSION_TOL };
        if !ok {
            self.fail(Witness {
                f: f.utils().to_vec(),
                g: None,
                events: events.iter().map(|e| e.to_indices()).collect(),
                x_values: xs,
                lhs,
                rhs,
                margin: lhs - rhs,
                detail: detail.to_string(),
            });
        }
    }

    fn single(&mut self, axiom: Axiom, e: &Event, stream: u64) -> Result<()> {
        let (fs, gs) = self.acts(stream);
        match axiom {
            Axiom::DcC | Axiom::DcS | Axiom::DcCs => self.pairs(axiom, e, &fs, &gs),
            _ => {
                for (f, h) in fs.iter().zip(&gs) {
                    self.tested += 1;
                    self.one_act(axiom, e, f, h)?;
                }
                Ok(())
            }
        }
    }

    fn one_act(&mut self, axiom: Axiom, e: &Event, f: &Act, h: &Act) -> Result<()> {
        let x = self.ce(e, f)?;
        let (lo, hi) = (self.cfg.lo, self.cfg.hi);
        match axiom {
            Axiom::Cr => {
                self.premises_met += 1;
                let lhs = self.u(&crate::prior::splice(f, e, h));
                let rhs = self.u(&crate::prior::splice(&constant(self.n(), x), e, h));
                self.expect_eq(f, Some(h), &[e], vec![x], lhs, rhs, "U(f_E h) = U(x_E h)");
            }
            Axiom::Dc => {
                let target = self.u(&crate::prior::splice(f, e, h));
                let (a, b) = f.range_on(e);
                let xh = bisect(|x| self.u(&crate::prior::splice(&constant(self.n(), x), e, h)) - target, a, b);
                self.premises_met += 1;
                self.expect_eq(f, Some(h), &[e], vec![xh], x, xh, "conditional value = x solving U(f_E h) = U(x_E h)");
            }
            Axiom::CrC => {
                self.premises_met += 1;
                let lhs = self.u_sp(f, e, x);
                self.expect_eq(f, None, &[e], vec![x], lhs, x, "U(f_E x) = x");
            }
            Axiom::CrB => {
                self.premises_met += 1;
                let lhs = self.u_sp(f, e, hi);
                let rhs = self.u_cc(x, e, hi);
                self.expect_eq(f, None, &[e], vec![x, hi], lhs, rhs, "U(f_E best) = U(x_E best)");
            }
            Axiom::CrS => {
                self.premises_met += 1;
                let t = self.threshold(e, f)?;
                let lhs = self.u_sp(f, e, t);
                let rhs = self.u_cc(x, e, t);
                self.expect_eq(f, None, &[e], vec![x, t], lhs, rhs, "U(f_E t) = U(x_E t)");
            }
            Axiom::CrSShrink => {
                self.premises_met += 1;
                let shifted = Act::from_raw(f.utils().iter().map(|u| u - lo).collect());
                let k = shrink_threshold(self.c, e, &shifted, hi - lo)?;
                let lhs = self.u_sp(&shifted.scale(1.0 / k), e, hi - lo);
                let rhs = self.u_cc((x - lo) / k, e, hi - lo);
                self.expect_eq(f, None, &[e], vec![x, k], lhs, rhs, "U((f/K)_E best) = U((x/K)_E best)");
            }
            Axiom::CrSMix => {
                self.premises_met += 1;
                let l = mix_threshold(self.c, e, f, lo, hi)?;
                let worst = splice_const(&constant(self.n(), lo), e, hi);
                let lhs = self.u(&splice_const(f, e, hi).mix(&worst, l));
                let rhs = self.u(&splice_const(&constant(self.n(), x), e, hi).mix(&worst, l));
                self.expect_eq(f, None, &[e], vec![x, l], lhs, rhs, "mixtures with worst_E best agree");
            }
            Axiom::ApproxCrS => {
                self.premises_met += 1;
                let t = self.threshold(e, f)?;
                let n = self.n();
                for eps in APPROX_EPS {
                    let (w, z) = (constant(n, 0.0), constant(n, eps));
                    for off in APPROX_OFFSETS {
                        let xs = t + off;
                        let fx = splice_const(f, e, xs);
                        let cx = splice_const(&constant(n, x), e, xs);
                        let a = self.u(&fx.mix(&w, 0.5));
                        let b = self.u(&cx.mix(&z, 0.5));
                        self.expect_le(
                            f,
                            &[e],
                            vec![x, xs, eps],
                            a,
                            b,
                            true,
                            "1/2 f_E x* + 1/2 w < 1/2 x_E x* + 1/2 z",
                        );
                        let a = self.u(&cx.mix(&w, 0.5));
                        let b = self.u(&fx.mix(&z, 0.5));
                        self.expect_le(
                            f,
                            &[e],
                            vec![x, xs, eps],
                            a,
                            b,
                            true,
                            "1/2 f_E x* + 1/2 z > 1/2 x_E x* + 1/2 w",
                        );
                    }
                }
            }
            Axiom::CrUo => {
                self.premises_met += 1;
                let under = self.u_sp(f, e, x);
                self.expect_le(f, &[e], vec![x], under, x, false, "U(f_E x) <= x");
                let t = self.threshold(e, f)?;
                let over_l = self.u_cc(x, e, t);
                let over_r = self.u_sp(f, e, t);
                self.expect_le(f, &[e], vec![x, t], over_l, over_r, false, "U(f_E t) >= U(x_E t)");
            }
            Axiom::DcC | Axiom::DcS | Axiom::DcCs | Axiom::Ec => unreachable!("pair axioms"),
        }
        Ok(())
    }

    fn pairs(&mut self, axiom: Axiom, e: &Event, fs: &[Act], gs: &[Act]) -> Result<()> {
        for (f, g) in fs.iter().zip(gs) {
            self.tested += 1;
            self.pair_case(axiom, e, f, g, false)?;
        }
        let mut built = 0;
        for (f, g) in fs.iter().zip(gs) {
            if built >= self.cfg.constructed_pairs {
                break;
            }
            let pair = match axiom {
                Axiom::DcC => {
                    let x = self.ce(e, f)?;
                    let target = self.u_sp(f, e, x);
                    let (ga, gb) = g.range_on(e);
                    let (fa, fb) = f.range_on(e);
                    let lo = 2.0 * fa.min(x) - gb - 1.0;
                    let hi = 2.0 * fb.max(x) - ga + 1.0;
                    let y = bisect(|y| self.u_sp(&g.mix_const(y, 0.5), e, x) - target, lo, hi);
                    Some((f.clone(), g.mix_const(y, 0.5)))
                }
                Axiom::DcS => {
                    let y = 2.0 * self.ml_ce(e, f)? - self.ml_ce(e, g)?;
                    Some((f.clone(), g.mix_const(y, 0.5)))
                }
                Axiom::DcCs => match construct_dc_cs_pair(self.c, e, f, g, self.rule, None) {
                    Ok(Construction::Pair(p)) => Some((p.f, p.g)),
                    Ok(Construction::Degenerate) | Err(Error::NotUnique) => None,
                    Err(err) => return Err(err),
                },
                _ => unreachable!("single-act axioms"),
            };
            if let Some((f2, g2)) = pair {
                if self.pair_case(axiom, e, &f2, &g2, true)? {
                    built += 1;
                    self.constructed += 1;
                }
            }
        }
        Ok(())
    }

    /// Checks one pair; returns whether its premises held.
    fn pair_case(&mut self, axiom: Axiom, e: &Event, f: &Act, g: &Act, constructed: bool) -> Result<bool> {
        let x = self.ce(e, f)?;
        let residuals = match axiom {
            Axiom::DcC => vec![(self.u_sp(f, e, x) - self.u_sp(g, e, x)).abs()],
            Axiom::DcS => {
                let t = self.threshold(e, f)?.max(self.threshold(e, g)?);
                vec![(self.u_sp(f, e, t) - self.u_sp(g, e, t)).abs()]
            }
            Axiom::DcCs => {
                let t = self.threshold(e, f)?.max(self.threshold(e, g)?);
                vec![(self.u_sp(f, e, x) - self.u_sp(g, e, x)).abs(), (self.u_sp(f, e, t) - self.u_sp(g, e, t)).abs()]
            }
            _ => unreachable!("pair axioms"),
        };
        if residuals.iter().any(|&r| r >= TAU_AXIOM) {
            return Ok(false);
        }
        self.premises_met += 1;
        if constructed {
            self.tested += 1;
        }
        let xg = self.ce(e, g)?;
        self.expect_eq(f, Some(g), &[e], vec![x, xg], x, xg, "conditional values of f and g agree");
        Ok(true)
    }

    fn ec(&mut self, e1: &Event, e2: &Event, stream: u64) -> Result<()> {
        let (fs, gs) = self.acts(stream);
        for (f, g) in fs.iter().zip(&gs) {
            self.tested += 1;
            self.ec_case(e1, e2, f, g, None)?;
        }
        let mut built = 0;
        for (f, g) in fs.iter().zip(&gs) {
            if built >= self.cfg.constructed_pairs {
                break;
            }
            match construct_ec_pair(self.c, e1, e2, f, g, self.rule, None) {
                Ok(Construction::Pair(p)) => {
                    self.tested += 1;
                    if self.ec_case(e1, e2, &p.f, &p.g, Some((p.x1_star, p.x2_star)))? {
                        built += 1;
                        self.constructed += 1;
                    }
                }
                Ok(Construction::Degenerate) => {}
                Err(err) => return Err(err),
            }
        }
        Ok(())
    }

    /// One EC case. Without supplied good consequences, `x1*` and `x2*` are
    /// calibrated from the joint threshold.
    fn ec_case(&mut self, e1: &Event, e2: &Event, f: &Act, g: &Act, stars: Option<(f64, f64)>) -> Result<bool> {
        let x = self.ce(e1, f)?;
        let t = [self.threshold(e1, f)?, self.threshold(e1, g)?, self.threshold(e2, f)?, self.threshold(e2, g)?]
            .into_iter()
            .fold(x, f64::max);
        let (x1s, x2s) = match stars {
            Some(s) => s,
            None => {
                let (_, hi1) = event_prob_bounds(self.c, e1);
                let (_, hi2) = event_prob_bounds(self.c, e2);
                match construct::calibrated_good_consequences(x, t, hi1, hi2) {
                    Some(s) => s,
                    None => return Ok(false),
                }
            }
        };
        let quantifiers_hold = x1s >= t - TAU_AXIOM
            && x2s >= t - TAU_AXIOM
            && (self.u_cc(x, e1, x1s) - self.u_cc(x, e2, x2s)).abs() < TAU_AXIOM;
        let premise_i = (self.u_sp(f, e1, x) - self.u_sp(g, e2, x)).abs() < TAU_AXIOM;
        let premise_ii = (self.u_sp(f, e1, x1s) - self.u_sp(g, e2, x2s)).abs() < TAU_AXIOM;
        if !(quantifiers_hold && premise_i && premise_ii) {
            return Ok(false);
        }
        self.premises_met += 1;
        let xg = self.ce(e2, g)?;
        self.expect_eq(f, Some(g), &[e1, e2], vec![x, x1s, x2s, xg], xg, x, "conditional value of g given E2 equals x");
        Ok(true)
    }
}

/// Root of the nondecreasing function `h` on `[a, b]`, widening the bracket
/// when needed.
fn bisect(mut h: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut width = (b - a).abs().max(1.0);
    while h(a) > 0.0 {
        a -= width;
        width *= 2.0;
    }
    let mut width = (b - a).abs().max(1.0);
    while h(b) < 0.0 {
        b += width;
        width *= 2.0;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if h(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
