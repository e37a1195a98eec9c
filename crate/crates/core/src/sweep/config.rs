//! Sweep configuration: a flat key-value document with dotted sections,
//! parsed as TOML.
//!
//! ```toml
//! family = "gaussian"      # gaussian | squeezed | faithful | linear_phase
//! seed = 7
//! sigma0 = 1.0             # a scalar is a single-point range
//! g.start = 0.0            # or start / stop / count
//! g.stop = 2.0
//! g.count = 5
//! t = 1.0
//! grid.n = 4801            # optional; grid.x_min / grid.x_max pin the window
//! qubit.alpha_re = 0.8366600265340756
//! qubit.beta_re = 0.5477225575051661
//! output.format = "csv"
//! ```
//!
//! See the README for the full key list.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::Grid;
use crate::ideality::DEFAULT_MASS_FLOOR;
use crate::measurement::QubitState;

pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
pub const DEFAULT_NODES: usize = 4801;
pub const DEFAULT_MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },
}

impl ConfigError {
    fn invalid(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Syntax(_) => 2,
            Self::Validation { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    Squeezed,
    Faithful,
    LinearPhase,
    /// Wavefunctions supplied from outside (the `certify` command).
    External,
}

impl Family {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(Self::Gaussian),
            "squeezed" => Some(Self::Squeezed),
            "faithful" => Some(Self::Faithful),
            "linear_phase" => Some(Self::LinearPhase),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Squeezed => "squeezed",
            Self::Faithful => "faithful",
            Self::LinearPhase => "linear_phase",
            Self::External => "external",
        }
    }

    /// Swept parameters, in canonical sweep order (last varies fastest).
    pub fn params(&self) -> &'static [Param] {
        use Param::*;
        match self {
            Self::Gaussian => &[Sigma0, G, T],
            Self::Squeezed => &[Sigma0, G, T, C],
            Self::Faithful => &[Sigma0, Theta, S, Tilt],
            Self::LinearPhase => &[Sigma0, S, Kappa],
            Self::External => &[],
        }
    }

    fn uses_envelope(&self) -> bool {
        matches!(self, Self::Faithful | Self::LinearPhase)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Sigma0,
    G,
    T,
    C,
    Theta,
    S,
    Kappa,
    Tilt,
}

impl Param {
    pub const ALL: [Param; 8] = [
        Param::Sigma0,
        Param::G,
        Param::T,
        Param::C,
        Param::Theta,
        Param::S,
        Param::Kappa,
        Param::Tilt,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Self::Sigma0 => "sigma0",
            Self::G => "g",
            Self::T => "t",
            Self::C => "c",
            Self::Theta => "theta",
            Self::S => "s",
            Self::Kappa => "kappa",
            Self::Tilt => "tilt",
        }
    }

    fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.key() == key)
    }

    pub fn default_value(&self) -> f64 {
        match self {
            Self::Sigma0 | Self::G | Self::T | Self::S => 1.0,
            Self::C | Self::Theta | Self::Kappa | Self::Tilt => 0.0,
        }
    }

    fn check(&self, v: f64) -> Result<(), String> {
        if !v.is_finite() {
            return Err(format!("{v} is not finite"));
        }
        match self {
            Self::Sigma0 | Self::S if v <= 0.0 => Err(format!("must be positive, got {v}")),
            Self::T | Self::Tilt if v < 0.0 => Err(format!("must be non-negative, got {v}")),
            _ => Ok(()),
        }
    }
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ParamRange {
    pub fn single(v: f64) -> Self {
        Self {
            start: v,
            stop: v,
            count: 1,
        }
    }

    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + span * (i as f64 / last)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    Gaussian,
    Triangular,
}

impl Envelope {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Triangular => "triangular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// Window settings. Without explicit bounds the grid is `(-12, 12, n)` when
/// that covers the point, and autosized from the parameters otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSetting {
    pub bounds: Option<(f64, f64)>,
    pub n: usize,
}

impl Default for GridSetting {
    fn default() -> Self {
        Self {
            bounds: None,
            n: DEFAULT_NODES,
        }
    }
}

impl GridSetting {
    pub fn default_grid(&self) -> Grid {
        let (lo, hi) = self.bounds.unwrap_or((-DEFAULT_HALF_WIDTH, DEFAULT_HALF_WIDTH));
        Grid::new(lo, hi, self.n).expect("grid settings are validated on construction")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    ranges: BTreeMap<Param, ParamRange>,
    pub envelope: Envelope,
    pub grid: GridSetting,
    pub qubit: QubitState,
    pub format: OutputFormat,
    pub seed: u64,
    pub max_points: usize,
    /// Monte-Carlo channel samples per point (0 disables sampling).
    pub samples: u64,
    pub mass_floor: f64,
}

impl SweepSpec {
    /// Single-point spec with every parameter at its default.
    pub fn new(family: Family) -> Self {
        let ranges = family
            .params()
            .iter()
            .map(|&p| (p, ParamRange::single(p.default_value())))
            .collect();
        let amp = Complex64::new(0.5f64.sqrt(), 0.0);
        Self {
            family,
            ranges,
            envelope: Envelope::Gaussian,
            grid: GridSetting::default(),
            qubit: QubitState::new(amp, amp).expect("equal superposition is normalized"),
            format: OutputFormat::Csv,
            seed: 0,
            max_points: DEFAULT_MAX_POINTS,
            samples: 0,
            mass_floor: DEFAULT_MASS_FLOOR,
        }
    }

    pub fn set_range(&mut self, param: Param, range: ParamRange) -> Result<(), ConfigError> {
        if !self.family.params().contains(&param) {
            return Err(ConfigError::invalid(
                param.key(),
                format!("does not apply to family `{}`", self.family),
            ));
        }
        if range.count == 0 {
            return Err(ConfigError::invalid(format!("{}.count", param.key()), "must be at least 1"));
        }
        for v in [range.start, range.stop] {
            param.check(v).map_err(|m| ConfigError::invalid(param.key(), m))?;
        }
        self.ranges.insert(param, range);
        Ok(())
    }

    pub fn set(&mut self, param: Param, value: f64) -> Result<(), ConfigError> {
        self.set_range(param, ParamRange::single(value))
    }

    pub fn range(&self, param: Param) -> Option<&ParamRange> {
        self.ranges.get(&param)
    }

    /// Ranges in canonical sweep order.
    pub fn ranges(&self) -> impl Iterator<Item = (Param, &ParamRange)> {
        self.family.params().iter().map(move |p| (*p, &self.ranges[p]))
    }

    pub fn point_count(&self) -> usize {
        self.ranges().map(|(_, r)| r.count).product()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let total = self
            .ranges()
            .try_fold(1usize, |acc, (_, r)| acc.checked_mul(r.count))
            .unwrap_or(usize::MAX);
        if total > self.max_points {
            return Err(ConfigError::invalid(
                "limits.max_points",
                format!("sweep has {total} points, above the cap of {}", self.max_points),
            ));
        }
        if !(self.mass_floor > 0.0 && self.mass_floor < 1.0) {
            return Err(ConfigError::invalid("certificate.mass_floor", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64, ConfigError> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(ConfigError::invalid(key, "expected a number")),
    }
}

fn as_count(key: &str, v: &toml::Value) -> Result<u64, ConfigError> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(ConfigError::invalid(key, "expected a non-negative integer")),
    }
}

fn as_str<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str, ConfigError> {
    v.as_str().ok_or_else(|| ConfigError::invalid(key, "expected a string"))
}

#[derive(Default)]
struct RangeParts {
    scalar: Option<f64>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
}

/// Parses and validates a sweep configuration. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<SweepSpec, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
    let mut flat = BTreeMap::new();
    flatten("", &table, &mut flat);

    let family_value = flat
        .get("family")
        .ok_or_else(|| ConfigError::invalid("family", "missing"))?;
    let family_name = as_str("family", family_value)?;
    let family = Family::parse(family_name)
        .ok_or_else(|| ConfigError::invalid("family", format!("unknown family `{family_name}`")))?;
    let mut spec = SweepSpec::new(family);

    let mut parts: BTreeMap<Param, RangeParts> = BTreeMap::new();
    let mut x_min = None;
    let mut x_max = None;
    let mut alpha = Complex64::new(0.0, 0.0);
    let mut beta = Complex64::new(0.0, 0.0);
    let mut qubit_given = false;

    for (key, value) in &flat {
        let k = key.as_str();
        match k {
            "family" => {}
            "seed" => spec.seed = as_count(k, value)?,
            "envelope" => {
                if !family.uses_envelope() {
                    return Err(ConfigError::invalid(k, format!("does not apply to family `{family}`")));
                }
                spec.envelope = match as_str(k, value)? {
                    "gaussian" => Envelope::Gaussian,
                    "triangular" => Envelope::Triangular,
                    other => return Err(ConfigError::invalid(k, format!("unknown envelope `{other}`"))),
                };
            }
            "grid.x_min" => x_min = Some(as_f64(k, value)?),
            "grid.x_max" => x_max = Some(as_f64(k, value)?),
            "grid.n" => spec.grid.n = as_count(k, value)? as usize,
            "qubit.alpha_re" => (alpha.re, qubit_given) = (as_f64(k, value)?, true),
            "qubit.alpha_im" => (alpha.im, qubit_given) = (as_f64(k, value)?, true),
            "qubit.beta_re" => (beta.re, qubit_given) = (as_f64(k, value)?, true),
            "qubit.beta_im" => (beta.im, qubit_given) = (as_f64(k, value)?, true),
            "output.format" => {
                let name = as_str(k, value)?;
                spec.format =
                    OutputFormat::parse(name).ok_or_else(|| ConfigError::invalid(k, format!("unknown format `{name}`")))?;
            }
            "limits.max_points" => spec.max_points = as_count(k, value)? as usize,
            "sampling.n" => spec.samples = as_count(k, value)?,
            "certificate.mass_floor" => spec.mass_floor = as_f64(k, value)?,
            _ => {
                let (head, tail) = match k.split_once('.') {
                    Some((h, t)) => (h, Some(t)),
                    None => (k, None),
                };
                let param = Param::from_key(head).ok_or_else(|| ConfigError::invalid(k, "unknown key"))?;
                let entry = parts.entry(param).or_default();
                match tail {
                    None => entry.scalar = Some(as_f64(k, value)?),
                    Some("start") => entry.start = Some(as_f64(k, value)?),
                    Some("stop") => entry.stop = Some(as_f64(k, value)?),
                    Some("count") => entry.count = Some(as_count(k, value)? as usize),
                    Some(_) => return Err(ConfigError::invalid(k, "unknown key")),
                }
            }
        }
    }

    for (param, p) in parts {
        let key = param.key();
        let range = match p {
            RangeParts {
                scalar: Some(v),
                start: None,
                stop: None,
                count: None,
            } => ParamRange::single(v),
            RangeParts { scalar: Some(_), .. } => {
                return Err(ConfigError::invalid(key, "give either a scalar or start/stop/count, not both"))
            }
            RangeParts {
                start: Some(start),
                stop,
                count,
                ..
            } => {
                let count = count.unwrap_or(1);
                let stop = match (stop, count) {
                    (Some(s), _) => s,
                    (None, 1) => start,
                    (None, _) => return Err(ConfigError::invalid(format!("{key}.stop"), "missing")),
                };
                ParamRange::new(start, stop, count)
            }
            RangeParts { start: None, .. } => {
                return Err(ConfigError::invalid(format!("{key}.start"), "missing"))
            }
        };
        spec.set_range(param, range)?;
    }

    if spec.grid.n < 3 || spec.grid.n % 2 == 0 {
        return Err(ConfigError::invalid("grid.n", format!("must be odd and at least 3, got {}", spec.grid.n)));
    }
    match (x_min, x_max) {
        (None, None) => {}
        (Some(lo), Some(hi)) => {
            Grid::new(lo, hi, spec.grid.n).map_err(|e| ConfigError::invalid("grid.x_min", e.to_string()))?;
            spec.grid.bounds = Some((lo, hi));
        }
        (Some(_), None) => return Err(ConfigError::invalid("grid.x_max", "missing (grid.x_min is set)")),
        (None, Some(_)) => return Err(ConfigError::invalid("grid.x_min", "missing (grid.x_max is set)")),
    }
    if qubit_given {
        spec.qubit = QubitState::new(alpha, beta).map_err(|e| ConfigError::invalid("qubit", e.to_string()))?;
    }
    spec.validate()?;
    Ok(spec)
}
