//! Sweep configuration read from TOML.
//!
//! ```toml
//! [channel]
//! alpha = 2            # integer or list
//! mu = [1, 2]          # integer or list
//! omega_s = 1.0        # Ω of the strong link
//! omega_w = 0.316      # number or list; must stay below omega_s
//!
//! [system]
//! a_s = 0.2            # number or list; the power command searches this grid
//! rho_db = "0:40:10"   # "start:stop:step" (inclusive), a number or a list
//! theta = [1.0]
//! tb = 1.0             # block time x bandwidth
//! strategy = "quadrature"   # or "closed-form"
//! r_target = 2.0       # weak-user target rate bounding the power grid
//!
//! [snc]
//! n = 168              # symbols per slot
//! lambda = [200.0]     # bits per slot, or
//! load = [0.7]         # arrivals as a fraction of the user's mean service
//! max_delay = 30
//! users = ["strong", "weak"]
//! s_min = 1e-6
//! s_max = 5.0
//! grid_points = 200
//!
//! [sim]
//! seed = 1
//! slots = 0            # queue simulation length; 0 disables
//! batches = 10
//!
//! [output]
//! path = "out.csv"
//! format = "csv"       # or "svg"
//! ```

use std::path::{Path, PathBuf};

use noma_effrate::snc::SSearch;
use noma_effrate::{EvalStrategy, User};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            Self::One(x) => vec![x.clone()],
            Self::Many(xs) => xs.clone(),
        }
    }
}

/// A dB grid: a single value, an explicit list, or `"start:stop:step"`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DbGrid {
    Value(f64),
    List(Vec<f64>),
    Range(String),
}

impl DbGrid {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match self {
            Self::Value(x) => Ok(vec![*x]),
            Self::List(xs) => Ok(xs.clone()),
            Self::Range(s) => parse_range(s),
        }
    }
}

/// Inclusive `start:stop:step`.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("expected start:stop:step, got {s:?}"));
    };
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("{t:?} is not a number in range {s:?}"))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if !(step > 0.0) || stop < start {
        return Err(format!("range {s:?} needs step > 0 and stop >= start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelBlock {
    pub alpha: OneOrMany<u32>,
    pub mu: OneOrMany<u32>,
    #[serde(default = "one")]
    pub omega_s: f64,
    pub omega_w: OneOrMany<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    Quadrature,
    ClosedForm,
}

impl From<StrategyName> for EvalStrategy {
    fn from(s: StrategyName) -> Self {
        match s {
            StrategyName::Quadrature => EvalStrategy::Quadrature,
            StrategyName::ClosedForm => EvalStrategy::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub a_s: Option<OneOrMany<f64>>,
    pub rho_db: DbGrid,
    #[serde(default = "default_theta")]
    pub theta: Vec<f64>,
    #[serde(default = "one")]
    pub tb: f64,
    #[serde(default = "default_strategy")]
    pub strategy: StrategyName,
    #[serde(default = "default_r_target")]
    pub r_target: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum UserName {
    Strong,
    Weak,
}

impl From<UserName> for User {
    fn from(u: UserName) -> Self {
        match u {
            UserName::Strong => User::Strong,
            UserName::Weak => User::Weak,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SncBlock {
    #[serde(default = "default_n")]
    pub n: u32,
    pub lambda: Option<Vec<f64>>,
    pub load: Option<Vec<f64>>,
    #[serde(default = "default_max_delay")]
    pub max_delay: u32,
    #[serde(default = "default_users")]
    pub users: Vec<UserName>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub grid_points: Option<usize>,
}

impl SncBlock {
    pub fn search(&self) -> SSearch {
        let d = SSearch::default();
        SSearch {
            s_min: self.s_min.unwrap_or(d.s_min),
            s_max: self.s_max.unwrap_or(d.s_max),
            grid_points: self.grid_points.unwrap_or(d.grid_points),
            ..d
        }
    }
}

/// How arrivals are specified.
#[derive(Debug, Clone, PartialEq)]
pub enum Arrivals {
    BitsPerSlot(Vec<f64>),
    Load(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    #[serde(default = "one_u64")]
    pub seed: u64,
    #[serde(default)]
    pub slots: u64,
    #[serde(default = "default_batches")]
    pub batches: u32,
}

impl Default for SimBlock {
    fn default() -> Self {
        Self {
            seed: 1,
            slots: 0,
            batches: default_batches(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Svg,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub channel: ChannelBlock,
    pub system: SystemBlock,
    pub snc: Option<SncBlock>,
    #[serde(default)]
    pub sim: SimBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

fn one() -> f64 {
    1.0
}
fn one_u64() -> u64 {
    1
}
fn default_theta() -> Vec<f64> {
    vec![1.0]
}
fn default_strategy() -> StrategyName {
    StrategyName::Quadrature
}
fn default_r_target() -> f64 {
    noma_effrate::effrate::DEFAULT_R_TARGET
}
fn default_n() -> u32 {
    168
}
fn default_max_delay() -> u32 {
    30
}
fn default_users() -> Vec<UserName> {
    vec![UserName::Strong, UserName::Weak]
}
fn default_batches() -> u32 {
    10
}

fn field_err(field: &str, message: impl Into<String>) -> CliError {
    CliError::Field {
        field: field.into(),
        message: message.into(),
    }
}

fn nonempty<T>(field: &str, v: &[T]) -> Result<(), CliError> {
    if v.is_empty() {
        Err(field_err(field, "must not be empty"))
    } else {
        Ok(())
    }
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|span| line_column(text, span.start))
                .unwrap_or((0, 0));
            CliError::Parse {
                line,
                column,
                message: e.message().to_owned(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        nonempty("channel.alpha", &self.channel.alpha.to_vec())?;
        nonempty("channel.mu", &self.channel.mu.to_vec())?;
        nonempty("channel.omega_w", &self.channel.omega_w.to_vec())?;
        if let Some(a) = &self.system.a_s {
            nonempty("system.a_s", &a.to_vec())?;
        }
        nonempty("system.theta", &self.system.theta)?;
        let rho = self
            .system
            .rho_db
            .values()
            .map_err(|m| field_err("system.rho_db", m))?;
        nonempty("system.rho_db", &rho)?;
        if let Some(snc) = &self.snc {
            nonempty("snc.users", &snc.users)?;
            match (&snc.lambda, &snc.load) {
                (Some(_), Some(_)) => {
                    return Err(field_err("snc", "give either lambda or load, not both"))
                }
                (Some(l), None) => nonempty("snc.lambda", l)?,
                (None, Some(l)) => nonempty("snc.load", l)?,
                (None, None) => return Err(field_err("snc", "one of lambda or load is required")),
            }
        }
        if self.sim.batches < 10 {
            return Err(field_err("sim.batches", "need at least 10 batches"));
        }
        Ok(())
    }

    pub fn rho_db(&self) -> Vec<f64> {
        self.system.rho_db.values().expect("validated")
    }

    pub fn snc(&self) -> Result<&SncBlock, CliError> {
        self.snc
            .as_ref()
            .ok_or_else(|| field_err("snc", "block is required for this command"))
    }

    pub fn arrivals(&self) -> Result<Arrivals, CliError> {
        let snc = self.snc()?;
        Ok(match (&snc.lambda, &snc.load) {
            (Some(l), _) => Arrivals::BitsPerSlot(l.clone()),
            (None, Some(l)) => Arrivals::Load(l.clone()),
            (None, None) => unreachable!("validated"),
        })
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}
