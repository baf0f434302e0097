//! Problem-spec files and the command implementations behind the `credal`
//! binary. Every command returns its report as a string; the binary prints
//! it and maps errors to exit codes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use credal_core::axioms::{check_axiom, matching_cut_level, rml_vs_lr_divergence, Axiom, AxiomReport, SamplerConfig};
use credal_core::persuasion::{self, AmbiguousDevice, PersuasionGame};
use credal_core::signals::{table1, SignalModel};
use credal_core::{conditional_ce, update, Act, CredalSet, Event, Prior, StateSpace, UpdateRule};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Errors with their process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(credal_core::Error),
    #[error("{0}")]
    UnknownName(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
            CliError::UnknownName(_) => 4,
        }
    }
}

impl From<credal_core::Error> for CliError {
    fn from(e: credal_core::Error) -> Self {
        match e {
            credal_core::Error::UnknownAxiom(_) | credal_core::Error::UnknownState(_) => {
                CliError::UnknownName(e.to_string())
            }
            other => CliError::Domain(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

/// A problem described as one JSON document. Acts are utility vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default)]
    pub states: Vec<String>,
    /// Vertices of the credal set, one probability vector per row.
    #[serde(default)]
    pub credal: Vec<Vec<f64>>,
    #[serde(default)]
    pub acts: BTreeMap<String, Vec<f64>>,
    /// Events as lists of state labels.
    #[serde(default)]
    pub events: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub rule: RuleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_model: Option<SignalBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persuasion: Option<PersuasionBlock>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RuleSpec {
    #[default]
    #[serde(rename = "FB")]
    FullBayes,
    #[serde(rename = "ML")]
    MaxLikelihood,
    #[serde(rename = "RML")]
    Rml { alpha: f64 },
    /// Contraction weights keyed by event name.
    #[serde(rename = "ContingentRML")]
    ContingentRml { alphas: BTreeMap<String, f64> },
    #[serde(rename = "LR")]
    LikelihoodRatio { lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalBlock {
    pub beta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersuasionBlock {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alphas: Vec<f64>,
    /// Two-state game; the built-in example when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub states: Vec<String>,
    pub prior: Vec<f64>,
    pub actions: Vec<String>,
    pub sender_payoff: Vec<Vec<f64>>,
    pub receiver_payoff: Vec<Vec<f64>>,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| parse_err(format!("invalid problem spec: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| parse_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Checks the spec against the core types, using `tol` for the credal set
    /// when given.
    pub fn resolve(&self, tol: Option<f64>) -> CliResult<Problem> {
        if self.states.is_empty() {
            return Err(parse_err("spec field `states` is missing or empty"));
        }
        if self.credal.is_empty() {
            return Err(parse_err("spec field `credal` is missing or empty"));
        }
        let space = StateSpace::new(self.states.clone()).map_err(|e| parse_err(format!("states: {e}")))?;
        let n = space.len();
        let priors = self
            .credal
            .iter()
            .enumerate()
            .map(|(i, row)| {
                if row.len() != n {
                    return Err(parse_err(format!("credal[{i}]: expected {n} entries, got {}", row.len())));
                }
                Prior::new(row.clone()).map_err(|e| parse_err(format!("credal[{i}]: {e}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let mut credal = CredalSet::new(priors).map_err(|e| parse_err(format!("credal: {e}")))?;
        if let Some(t) = tol {
            credal = credal.with_tol(t);
        }
        let acts = self
            .acts
            .iter()
            .map(|(name, u)| {
                if u.len() != n {
                    return Err(parse_err(format!("acts.{name}: expected {n} entries, got {}", u.len())));
                }
                let act = Act::new(u.clone()).map_err(|e| parse_err(format!("acts.{name}: {e}")))?;
                Ok((name.clone(), act))
            })
            .collect::<CliResult<BTreeMap<_, _>>>()?;
        let events = self
            .events
            .iter()
            .map(|(name, labels)| {
                let e = space.event(labels).map_err(|e| parse_err(format!("events.{name}: {e}")))?;
                Ok((name.clone(), e))
            })
            .collect::<CliResult<BTreeMap<_, _>>>()?;
        let rule = self.rule.to_rule(&events)?;
        Ok(Problem { space, credal, acts, events, rule, seed: self.seed })
    }
}

impl RuleSpec {
    pub fn to_rule(&self, events: &BTreeMap<String, Event>) -> CliResult<UpdateRule> {
        let unit = |v: f64, what: &str| {
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(parse_err(format!("rule.{what} = {v} is outside [0, 1]")))
            }
        };
        Ok(match self {
            RuleSpec::FullBayes => UpdateRule::FullBayes,
            RuleSpec::MaxLikelihood => UpdateRule::MaxLikelihood,
            RuleSpec::Rml { alpha } => UpdateRule::Rml(unit(*alpha, "alpha")?),
            RuleSpec::LikelihoodRatio { lambda } => UpdateRule::LikelihoodRatio(unit(*lambda, "lambda")?),
            RuleSpec::ContingentRml { alphas } => UpdateRule::ContingentRml(
                alphas
                    .iter()
                    .map(|(name, a)| {
                        let e = events
                            .get(name)
                            .ok_or_else(|| parse_err(format!("rule.alphas: no event named `{name}`")))?;
                        Ok((*e, unit(*a, "alphas")?))
                    })
                    .collect::<CliResult<_>>()?,
            ),
        })
    }
}

/// A spec resolved into core types.
#[derive(Debug, Clone)]
pub struct Problem {
    pub space: StateSpace,
    pub credal: CredalSet,
    pub acts: BTreeMap<String, Act>,
    pub events: BTreeMap<String, Event>,
    pub rule: UpdateRule,
    pub seed: u64,
}

impl Problem {
    pub fn event(&self, name: &str) -> CliResult<Event> {
        self.events
            .get(name)
            .copied()
            .ok_or_else(|| CliError::UnknownName(format!("no event named `{name}` in the spec")))
    }
}

/// Rule selection from command-line flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Fb,
    Ml,
    Rml,
    Lr,
}

impl std::str::FromStr for RuleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fb" => Ok(RuleKind::Fb),
            "ml" => Ok(RuleKind::Ml),
            "rml" => Ok(RuleKind::Rml),
            "lr" => Ok(RuleKind::Lr),
            other => Err(format!("unknown rule `{other}` (expected fb, ml, rml or lr)")),
        }
    }
}

/// The rule named by the flags, or `None` to keep the spec's rule. A bare
/// `--alpha` selects RML and a bare `--lambda` selects LR.
pub fn rule_override(kind: Option<RuleKind>, alpha: Option<f64>, lambda: Option<f64>) -> CliResult<Option<UpdateRule>> {
    let kind = match (kind, alpha, lambda) {
        (Some(k), _, _) => k,
        (None, Some(_), None) => RuleKind::Rml,
        (None, None, Some(_)) => RuleKind::Lr,
        (None, None, None) => return Ok(None),
        (None, Some(_), Some(_)) => return Err(parse_err("give --rule when passing both --alpha and --lambda")),
    };
    let unit = |v: f64, flag: &str| {
        if (0.0..=1.0).contains(&v) {
            Ok(v)
        } else {
            Err(parse_err(format!("--{flag} {v} is outside [0, 1]")))
        }
    };
    Ok(Some(match kind {
        RuleKind::Fb => UpdateRule::FullBayes,
        RuleKind::Ml => UpdateRule::MaxLikelihood,
        RuleKind::Rml => UpdateRule::Rml(unit(alpha.ok_or_else(|| parse_err("--rule rml needs --alpha"))?, "alpha")?),
        RuleKind::Lr => {
            UpdateRule::LikelihoodRatio(unit(lambda.ok_or_else(|| parse_err("--rule lr needs --lambda"))?, "lambda")?)
        }
    }))
}

/// Reads `CREDAL_TOL` from the given value of the environment variable.
pub fn tolerance_from(var: Option<&str>) -> CliResult<Option<f64>> {
    match var {
        None => Ok(None),
        Some(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(Some(t)),
            _ => Err(parse_err(format!("CREDAL_TOL must be a positive number, got `{s}`"))),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Md,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Md),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv, md or json)")),
        }
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `x` with 12 significant digits in its shortest decimal form.
pub fn num(x: f64) -> String {
    format!("{}", round12(x))
}

fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json!(round12(n.as_f64().expect("f64"))),
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn to_json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(v)).expect("json serializes");
    s.push('\n');
    s
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Md => {
                let _ = writeln!(out, "| {} |", self.header.join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(self.header.len()));
                for r in &self.rows {
                    let _ = writeln!(out, "| {} |", r.join(" | "));
                }
            }
            _ => {
                let _ = writeln!(out, "{}", self.header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(","));
                for r in &self.rows {
                    let _ = writeln!(out, "{}", r.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(","));
                }
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Posterior vertices after the named event and the conditional value of
/// every act in the spec. The rule itself is not echoed, so rules with equal
/// posteriors print identical reports.
pub fn cmd_update(p: &Problem, event: &str, rule: Option<&UpdateRule>, format: Format) -> CliResult<String> {
    let e = p.event(event)?;
    let rule = rule.unwrap_or(&p.rule);
    let post = update(&p.credal, &e, rule)?;
    let values = p
        .acts
        .iter()
        .map(|(name, f)| Ok((name.clone(), conditional_ce(&p.credal, &e, rule, f)?)))
        .collect::<CliResult<Vec<_>>>()?;
    if format == Format::Json {
        let posterior: Vec<Vec<f64>> = post.vertices().iter().map(|v| v.probs().to_vec()).collect();
        let values: serde_json::Map<String, Value> = values.into_iter().map(|(k, v)| (k, json!(v))).collect();
        return Ok(to_json_text(json!({
            "event": event,
            "states": p.space.labels(),
            "posterior": posterior,
            "conditional_values": values,
        })));
    }
    let mut verts = Table::new(std::iter::once("vertex".to_string()).chain(p.space.labels().iter().cloned()));
    for (i, v) in post.vertices().iter().enumerate() {
        verts.push(std::iter::once((i + 1).to_string()).chain(v.probs().iter().map(|&x| num(x))).collect());
    }
    let mut acts = Table::new(["act", "conditional_value"]);
    for (name, v) in values {
        acts.push(vec![name, num(v)]);
    }
    Ok(format!("{}\n{}", verts.render(format), acts.render(format)))
}

/// Signal table rows for the model, both signals, in the order of `alphas`.
pub fn cmd_table1(model: &SignalModel, alphas: &[f64], format: Format) -> CliResult<String> {
    if alphas.is_empty() {
        return Err(parse_err("the alpha list is empty"));
    }
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(parse_err(format!("alpha {a} is outside [0, 1]")));
    }
    let rows = table1(model, alphas)?;
    if format == Format::Json {
        return Ok(to_json_text(serde_json::to_value(&rows).expect("rows serialize")));
    }
    let mut t = Table::new(["signal", "alpha", "ml_prior", "eval", "benchmark", "comparison"]);
    for r in rows {
        let ml = match r.ml_prior {
            credal_core::signals::MlPrior::Mu(m) => format!("mu={}", num(m)),
            credal_core::signals::MlPrior::All => "all".into(),
        };
        t.push(vec![r.signal.to_string(), num(r.alpha), ml, num(r.eval_f), num(r.benchmark), r.comparison.to_string()]);
    }
    Ok(t.render(format))
}

/// Axiom reports for every requested axiom over the given events.
pub fn cmd_axioms(
    p: &Problem,
    axioms: &[String],
    events: &[String],
    rule: Option<&UpdateRule>,
    cfg: &SamplerConfig,
    format: Format,
) -> CliResult<String> {
    let axioms = axioms.iter().map(|a| a.parse::<Axiom>().map_err(CliError::from)).collect::<CliResult<Vec<_>>>()?;
    if axioms.is_empty() {
        return Err(parse_err("no axioms requested"));
    }
    let names: Vec<String> = if events.is_empty() { p.events.keys().cloned().collect() } else { events.to_vec() };
    if names.is_empty() {
        return Err(parse_err("the spec names no events"));
    }
    let evs = names.iter().map(|n| p.event(n)).collect::<CliResult<Vec<_>>>()?;
    let rule = rule.unwrap_or(&p.rule);
    let reports: Vec<AxiomReport> =
        axioms.iter().map(|&a| check_axiom(a, &p.credal, rule, &evs, cfg)).collect::<credal_core::Result<_>>()?;
    if format == Format::Json {
        return Ok(to_json_text(serde_json::to_value(&reports).expect("reports serialize")));
    }
    let mut t = Table::new(["axiom", "passed", "samples", "premises_met", "constructed", "witness_margin"]);
    for r in reports {
        t.push(vec![
            r.axiom.clone(),
            r.passed.to_string(),
            r.samples_tested.to_string(),
            r.premises_met.to_string(),
            r.constructed_pairs.to_string(),
            r.witness.map(|w| num(w.margin)).unwrap_or_default(),
        ]);
    }
    Ok(t.render(format))
}

impl GameSpec {
    pub fn to_game(&self) -> CliResult<PersuasionGame> {
        let states = StateSpace::new(self.states.clone()).map_err(|e| parse_err(format!("game.states: {e}")))?;
        let prior = Prior::new(self.prior.clone()).map_err(|e| parse_err(format!("game.prior: {e}")))?;
        PersuasionGame::new(
            states,
            prior,
            self.actions.clone(),
            self.sender_payoff.clone(),
            self.receiver_payoff.clone(),
        )
        .map_err(|e| parse_err(format!("game: {e}")))
    }
}

/// Receiver play and sender value on the two-kernel device for every
/// `(lambda, alpha)` pair.
pub fn cmd_persuasion(game: &PersuasionGame, lambdas: &[f64], alphas: &[f64], format: Format) -> CliResult<String> {
    if lambdas.is_empty() || alphas.is_empty() {
        return Err(parse_err("the lambda and alpha grids must be nonempty"));
    }
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(parse_err(format!("alpha {a} is outside [0, 1]")));
    }
    let rows = persuasion::sweep(game, lambdas, alphas)?;
    if format == Format::Json {
        return Ok(to_json_text(serde_json::to_value(&rows).expect("rows serialize")));
    }
    let messages: Vec<String> = bll_messages();
    let mut t = Table::new(
        ["lambda".to_string(), "alpha".to_string()]
            .into_iter()
            .chain(messages.iter().map(|m| format!("action_{m}")))
            .chain(["sender_value".to_string(), "uniform_likelihood".to_string()]),
    );
    for r in rows {
        let mut row = vec![num(r.lambda), num(r.alpha)];
        row.extend(r.actions.iter().map(|a| a.clone().unwrap_or_else(|| "-".into())));
        row.push(num(r.sender_value));
        row.push(r.uniform_likelihood.to_string());
        t.push(row);
    }
    Ok(t.render(format))
}

fn bll_messages() -> Vec<String> {
    let d: AmbiguousDevice = persuasion::bll_device(0.5).expect("valid parameter");
    d.messages
}

/// Whether no likelihood-ratio cut reproduces the RML posterior set.
pub fn cmd_divergence(p: &Problem, event: &str, alpha: f64, grid: usize, format: Format) -> CliResult<String> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(parse_err(format!("alpha {alpha} is outside [0, 1]")));
    }
    let e = p.event(event)?;
    let diverges = rml_vs_lr_divergence(&p.credal, &e, alpha, grid)?;
    let level = matching_cut_level(&p.credal, &e, alpha);
    if format == Format::Json {
        return Ok(to_json_text(json!({
            "event": event,
            "alpha": alpha,
            "grid": grid,
            "matching_level": level,
            "diverges": diverges,
        })));
    }
    let mut t = Table::new(["event", "alpha", "grid", "matching_level", "diverges"]);
    t.push(vec![event.to_string(), num(alpha), grid.to_string(), num(level), diverges.to_string()]);
    Ok(t.render(format))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(num(2.0 / 3.0), "0.666666666667");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(2.0000000000000004), "2");
        assert_eq!(num(123456789.1234567), "123456789.123");
    }

    #[test]
    fn rule_flags() {
        assert_eq!(rule_override(None, Some(0.3), None).unwrap(), Some(UpdateRule::Rml(0.3)));
        assert_eq!(rule_override(None, None, Some(0.5)).unwrap(), Some(UpdateRule::LikelihoodRatio(0.5)));
        assert_eq!(rule_override(Some(RuleKind::Ml), None, None).unwrap(), Some(UpdateRule::MaxLikelihood));
        assert!(rule_override(Some(RuleKind::Rml), None, None).is_err());
        assert!(rule_override(None, Some(1.5), None).is_err());
        assert_eq!(rule_override(None, None, None).unwrap(), None);
    }

    #[test]
    fn tolerance_variable() {
        assert_eq!(tolerance_from(None).unwrap(), None);
        assert_eq!(tolerance_from(Some("1e-7")).unwrap(), Some(1e-7));
        assert!(tolerance_from(Some("-1")).is_err());
        assert!(tolerance_from(Some("abc")).is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ProblemSpec::from_json(r#"{"states": ["a", "b"], "credal": [[0.5, 0.5]], "colour": 1}"#);
        assert!(matches!(err, Err(CliError::Parse(_))));
        let err = ProblemSpec::from_json(r#"{"rule": {"kind": "RML", "alpha": 0.5, "beta": 1}}"#);
        assert!(matches!(err, Err(CliError::Parse(_))));
    }

    #[test]
    fn contingent_rule_refers_to_named_events() {
        let spec = ProblemSpec::from_json(
            r#"{"states": ["a", "b", "c"], "credal": [[0.2, 0.3, 0.5]],
                "events": {"E": ["a", "b"]},
                "rule": {"kind": "ContingentRML", "alphas": {"E": 0.4}}}"#,
        )
        .unwrap();
        let p = spec.resolve(None).unwrap();
        assert_eq!(p.rule.alpha_for(&p.event("E").unwrap()).unwrap(), Some(0.4));
        let bad = ProblemSpec { rule: RuleSpec::ContingentRml { alphas: [("F".into(), 0.4)].into() }, ..spec };
        assert!(matches!(bad.resolve(None), Err(CliError::Parse(_))));
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(credal_core::Error::UnknownAxiom("X".into())).exit_code(), 4);
        assert_eq!(CliError::from(credal_core::Error::NotStrictNonnull { lo: 0.0, hi: 1.0 }).exit_code(), 3);
        assert_eq!(parse_err("x").exit_code(), 2);
    }
}
