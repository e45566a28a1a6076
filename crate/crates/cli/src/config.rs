//! Run configuration: defaults, config-file echo, flag overrides, validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use qhj_core::{OdeOptions, PhysicalConstants, PotentialSpec, SeriesSelector, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Eigen,
    Table1,
    Wavefn,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Eigen => "eigen",
            CommandKind::Table1 => "table1",
            CommandKind::Wavefn => "wavefn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Compare {
    Numerov,
    Wkb,
    Both,
}

impl Compare {
    pub fn numerov(self) -> bool {
        matches!(self, Compare::Numerov | Compare::Both)
    }

    pub fn wkb(self) -> bool {
        matches!(self, Compare::Wkb | Compare::Both)
    }
}

/// How `b = X'(x1)` is chosen for the allowed region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum BPolicy {
    /// Energy-dependent default used while shooting.
    Auto,
    /// The value with `ΔX = (n + ½)πħ`.
    BStar,
    Value(f64),
}

impl fmt::Display for BPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BPolicy::Auto => f.write_str("auto"),
            BPolicy::BStar => f.write_str("bstar"),
            BPolicy::Value(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for BPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "auto" => Ok(BPolicy::Auto),
            "bstar" | "b*" => Ok(BPolicy::BStar),
            other => match other.parse::<f64>() {
                Ok(b) if b > 0.0 && b.is_finite() => Ok(BPolicy::Value(b)),
                _ => Err(format!("--b expects a positive number, 'auto' or 'bstar', got '{other}'")),
            },
        }
    }
}

impl From<BPolicy> for String {
    fn from(b: BPolicy) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BPolicy {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// Inclusive range of quantum numbers, written `n` or `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct LevelRange {
    pub start: usize,
    pub end: usize,
}

impl LevelRange {
    pub fn single(n: usize) -> Self {
        LevelRange { start: n, end: n }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }

    pub fn is_single(self) -> bool {
        self.start == self.end
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}..{}", self.start, self.end)
        }
    }
}

impl FromStr for LevelRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("--n expects a nonnegative integer or a range 'a..b', got '{s}'");
        let s = s.trim();
        if let Some((a, b)) = s.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let start = a.trim().parse().map_err(|_| bad())?;
            let end = b.trim().parse().map_err(|_| bad())?;
            if start > end {
                return Err(format!("empty level range '{s}'"));
            }
            Ok(LevelRange { start, end })
        } else {
            s.parse().map(LevelRange::single).map_err(|_| bad())
        }
    }
}

impl From<LevelRange> for String {
    fn from(r: LevelRange) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for LevelRange {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// Everything that determines a run's output. Echoed into every output
/// file so that the file can be fed back through `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    pub constants: PhysicalConstants,
    pub n: LevelRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    pub tol_e: f64,
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
    pub decay_budget: f64,
    pub b: BPolicy,
    #[serde(default)]
    pub series: Vec<SeriesSelector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<Compare>,
    pub points: usize,
    pub format: Format,
    /// Not echoed: the same run written to two paths must produce
    /// identical bytes.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn defaults(command: CommandKind) -> Self {
        let solver = SolverConfig::default();
        RunConfig {
            command,
            potential: None,
            constants: PhysicalConstants::default(),
            n: if command == CommandKind::Table1 { LevelRange { start: 0, end: 2 } } else { LevelRange::single(0) },
            energy: None,
            tol_e: solver.tol_e,
            ode_rel_tol: solver.ode.rel_tol,
            ode_abs_tol: solver.ode.abs_tol,
            decay_budget: solver.decay_budget,
            b: if command == CommandKind::Wavefn { BPolicy::BStar } else { BPolicy::Auto },
            series: if command == CommandKind::Wavefn { vec![SeriesSelector::Psi] } else { Vec::new() },
            compare: None,
            points: qhj_core::assembly::DEFAULT_EXPORT_POINTS,
            format: Format::Csv,
            out: None,
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            tol_e: self.tol_e,
            ode: OdeOptions { rel_tol: self.ode_rel_tol, abs_tol: self.ode_abs_tol, ..OdeOptions::default() },
            decay_budget: self.decay_budget,
            ..SolverConfig::default()
        }
    }

    pub fn potential(&self) -> Result<&PotentialSpec, CliError> {
        self.potential.as_ref().ok_or_else(|| CliError::config("--potential is required"))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive(self.tol_e, "tol_e")?;
        positive(self.ode_rel_tol, "ode_rel_tol")?;
        positive(self.ode_abs_tol, "ode_abs_tol")?;
        positive(self.decay_budget, "decay_budget")?;
        PhysicalConstants::new(self.constants.hbar, self.constants.mass)?;
        self.solver().validate()?;
        if self.points < 2 {
            return Err(CliError::config("points must be at least 2"));
        }
        match self.command {
            CommandKind::Table1 => {
                if self.potential.is_some() {
                    return Err(CliError::config("table1 uses fixed quartic potentials; drop --potential"));
                }
            }
            CommandKind::Eigen => {
                self.potential()?;
            }
            CommandKind::Wavefn => {
                self.potential()?;
                if !self.n.is_single() {
                    return Err(CliError::config("wavefn takes a single --n"));
                }
                if let Some(e) = self.energy {
                    if !e.is_finite() {
                        return Err(CliError::config("--energy must be finite"));
                    }
                }
                if self.b != BPolicy::BStar {
                    if let Some(s) = self.series.iter().find(|s| s.requires_b_star()) {
                        return Err(qhj_core::Error::SelectorRequiresBStar(s.name()).into());
                    }
                }
            }
        }
        Ok(())
    }
}

/// Reads a run configuration from a previous output file (JSON document or
/// CSV with a leading `# {...}` line) or from a bare configuration object.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

pub fn parse_config_text(text: &str) -> Result<RunConfig, String> {
    let trimmed = text.trim_start();
    let doc: serde_json::Value = if let Some(rest) = trimmed.strip_prefix('#') {
        let line = rest.lines().next().unwrap_or("");
        serde_json::from_str(line).map_err(|e| e.to_string())?
    } else {
        serde_json::from_str(trimmed).map_err(|e| e.to_string())?
    };
    let cfg = match doc.get("config") {
        Some(c) => c.clone(),
        None => doc,
    };
    serde_json::from_value(cfg).map_err(|e| e.to_string())
}
