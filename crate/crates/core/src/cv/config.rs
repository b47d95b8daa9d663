use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::blocks::TimeBlockTable;
use super::windows::Scheme;
use crate::data::{EndpointConfig, FillPolicy};
use crate::forecast::RankPolicy;
use crate::{Error, Result};

/// Data source and alignment settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default = "default_cache_dir")]
    pub cache_dir: PathBuf,
    #[serde(default = "default_tickers")]
    pub tickers: Vec<String>,
    #[serde(default = "default_start")]
    pub start: NaiveDate,
    #[serde(default = "default_end")]
    pub end: NaiveDate,
    #[serde(default = "default_fill_policy")]
    pub fill_policy: FillPolicy,
    #[serde(default = "default_max_routine_gap")]
    pub max_routine_gap: usize,
    #[serde(default)]
    pub offline: bool,
    #[serde(default)]
    pub endpoint: EndpointConfig,
}

fn default_cache_dir() -> PathBuf {
    PathBuf::from("cache")
}
fn default_tickers() -> Vec<String> {
    crate::data::DEFAULT_TICKERS
        .iter()
        .map(|s| s.to_string())
        .collect()
}
fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(1977, 2, 15).expect("valid date")
}
fn default_end() -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 1, 11).expect("valid date")
}
fn default_fill_policy() -> FillPolicy {
    FillPolicy::Carry
}
fn default_max_routine_gap() -> usize {
    5
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            cache_dir: default_cache_dir(),
            tickers: default_tickers(),
            start: default_start(),
            end: default_end(),
            fill_policy: default_fill_policy(),
            max_routine_gap: default_max_routine_gap(),
            offline: false,
            endpoint: EndpointConfig::default(),
        }
    }
}

/// Walk-forward protocol settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_train_window")]
    pub train_window: usize,
    #[serde(default = "default_step")]
    pub step: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
}

fn default_scheme() -> Scheme {
    Scheme::Sliding
}
fn default_train_window() -> usize {
    1044
}
fn default_step() -> usize {
    5
}
fn default_horizon() -> usize {
    15
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            scheme: default_scheme(),
            train_window: default_train_window(),
            step: default_step(),
            horizon: default_horizon(),
        }
    }
}

/// Run-level settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker cap for window evaluation; 0 means one per core.
    #[serde(default)]
    pub parallelism: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Also emit the per-block series file.
    #[serde(default = "default_true")]
    pub per_block: bool,
}

fn default_seed() -> u64 {
    42
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}
fn default_true() -> bool {
    true
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            parallelism: 0,
            output_dir: default_output_dir(),
            per_block: default_true(),
        }
    }
}

/// External adapter settings as they appear in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalModelConfig {
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default = "default_adapter_timeout")]
    pub timeout_secs: u64,
    #[serde(default)]
    pub config: serde_json::Value,
}

fn default_adapter_timeout() -> u64 {
    300
}

/// A validated model roster entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub id: String,
    pub kind: ModelKind,
    pub stationary_input: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    Naive,
    NaiveMean,
    SeasonalNaive {
        season: usize,
    },
    Arima {
        max_p: usize,
        max_q: usize,
    },
    DhrArima {
        period: usize,
        harmonics: usize,
        max_p: usize,
        max_q: usize,
    },
    Var {
        max_lag: usize,
    },
    Vecm {
        max_lag: usize,
        rank: RankPolicy,
    },
    External {
        adapter: ExternalModelConfig,
    },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Naive => "naive",
            ModelKind::NaiveMean => "naive-mean",
            ModelKind::SeasonalNaive { .. } => "seasonal-naive",
            ModelKind::Arima { .. } => "arima",
            ModelKind::DhrArima { .. } => "dhr-arima",
            ModelKind::Var { .. } => "var",
            ModelKind::Vecm { .. } => "vecm",
            ModelKind::External { .. } => "external",
        }
    }

    pub fn is_multivariate(&self) -> bool {
        matches!(self, ModelKind::Var { .. } | ModelKind::Vecm { .. })
    }
}

/// Raw model entry as written in TOML.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModelEntry {
    pub kind: String,
    pub id: Option<String>,
    pub stationary_input: Option<bool>,
    pub season: Option<usize>,
    pub period: Option<usize>,
    pub harmonics: Option<usize>,
    pub max_p: Option<usize>,
    pub max_q: Option<usize>,
    pub max_lag: Option<usize>,
    /// `"trace"` or a fixed rank number.
    pub rank: Option<toml::Value>,
    pub command: Option<String>,
    pub args: Option<Vec<String>>,
    pub timeout_secs: Option<u64>,
    pub config: Option<toml::Value>,
}

/// Raw experiment file as written in TOML.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub data: Option<DataConfig>,
    #[serde(default)]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default)]
    pub run: Option<RunConfig>,
    #[serde(default, rename = "model")]
    pub models: Vec<RawModelEntry>,
    #[serde(default)]
    pub blocks: Option<TimeBlockTable>,
}

/// Fully validated experiment description; everything a run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: DataConfig,
    pub protocol: ProtocolConfig,
    pub run: RunConfig,
    pub models: Vec<ModelEntry>,
    pub blocks: TimeBlockTable,
}

impl ExperimentConfig {
    /// SHA-256 over the canonical JSON form; embedded in every output.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(&json);
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The default benchmark: sliding window 1044/5/15 with all core models.
    pub fn default_experiment() -> Self {
        let raw = RawConfig {
            models: vec![
                RawModelEntry {
                    kind: "naive".into(),
                    ..Default::default()
                },
                RawModelEntry {
                    kind: "naive-mean".into(),
                    ..Default::default()
                },
                RawModelEntry {
                    kind: "seasonal-naive".into(),
                    ..Default::default()
                },
                RawModelEntry {
                    kind: "arima".into(),
                    ..Default::default()
                },
                RawModelEntry {
                    kind: "dhr-arima".into(),
                    ..Default::default()
                },
                RawModelEntry {
                    kind: "var".into(),
                    id: Some("diff-var".into()),
                    ..Default::default()
                },
                RawModelEntry {
                    kind: "vecm".into(),
                    ..Default::default()
                },
            ],
            ..Default::default()
        };
        validate_config(raw).expect("default experiment is valid")
    }
}

/// Reads and validates a TOML experiment file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    validate_config(raw)
}

/// Resolves defaults and validates every field. Shared by `run` and
/// `validate-config`, so they accept exactly the same files.
pub fn validate_config(raw: RawConfig) -> Result<ExperimentConfig> {
    let data = raw.data.unwrap_or_default();
    let protocol = raw.protocol.unwrap_or_default();
    let run = raw.run.unwrap_or_default();

    if data.tickers.is_empty() {
        return Err(Error::Config("at least one ticker is required".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for t in &data.tickers {
        if !seen.insert(t) {
            return Err(Error::Config(format!("duplicate ticker {t}")));
        }
        if t.is_empty() || t.contains(',') || t.contains(char::is_whitespace) {
            return Err(Error::Config(format!(
                "ticker {t:?} must be nonempty without commas or whitespace"
            )));
        }
    }
    if data.start >= data.end {
        return Err(Error::Config(format!(
            "data span start {} is not before end {}",
            data.start, data.end
        )));
    }
    if protocol.train_window == 0 || protocol.step == 0 || protocol.horizon == 0 {
        return Err(Error::Config(
            "train_window, step, and horizon must all be positive".into(),
        ));
    }
    if raw.models.is_empty() {
        return Err(Error::Config(
            "at least one [[model]] entry is required".into(),
        ));
    }

    let m = data.tickers.len();
    let mut models = Vec::with_capacity(raw.models.len());
    for entry in &raw.models {
        models.push(resolve_model(entry, m)?);
    }
    let mut ids = std::collections::BTreeSet::new();
    for model in &models {
        if !ids.insert(model.id.clone()) {
            return Err(Error::Config(format!("duplicate model id {:?}", model.id)));
        }
    }

    let blocks = raw.blocks.unwrap_or_default();
    if blocks.is_empty() {
        return Err(Error::Config("block table cannot be empty".into()));
    }

    Ok(ExperimentConfig {
        data,
        protocol,
        run,
        models,
        blocks,
    })
}

fn resolve_model(raw: &RawModelEntry, n_tenors: usize) -> Result<ModelEntry> {
    let kind = match raw.kind.as_str() {
        "naive" => ModelKind::Naive,
        "naive-mean" => ModelKind::NaiveMean,
        "seasonal-naive" => {
            let season = raw.season.unwrap_or(5);
            if season == 0 {
                return Err(Error::Config("seasonal-naive season must be ≥ 1".into()));
            }
            ModelKind::SeasonalNaive { season }
        }
        "arima" => ModelKind::Arima {
            max_p: raw.max_p.unwrap_or(5),
            max_q: raw.max_q.unwrap_or(5),
        },
        "dhr-arima" => {
            let period = raw.period.unwrap_or(261);
            let harmonics = raw.harmonics.unwrap_or(3);
            if period < 2 {
                return Err(Error::Config("dhr-arima period must be ≥ 2".into()));
            }
            if harmonics * 2 > period {
                return Err(Error::Config(format!(
                    "dhr-arima harmonics {harmonics} exceeds period/2 = {}",
                    period / 2
                )));
            }
            ModelKind::DhrArima {
                period,
                harmonics,
                max_p: raw.max_p.unwrap_or(5),
                max_q: raw.max_q.unwrap_or(5),
            }
        }
        "var" => {
            let max_lag = raw.max_lag.unwrap_or(10);
            if max_lag == 0 {
                return Err(Error::Config("var max_lag must be ≥ 1".into()));
            }
            ModelKind::Var { max_lag }
        }
        "vecm" => {
            let max_lag = raw.max_lag.unwrap_or(10);
            if max_lag == 0 {
                return Err(Error::Config("vecm max_lag must be ≥ 1".into()));
            }
            let rank = match &raw.rank {
                None => RankPolicy::Trace,
                Some(toml::Value::String(s)) if s == "trace" => RankPolicy::Trace,
                Some(toml::Value::Integer(r)) if *r >= 0 => RankPolicy::Fixed(*r as usize),
                Some(other) => {
                    return Err(Error::Config(format!(
                        "vecm rank must be \"trace\" or a nonnegative integer, got {other}"
                    )))
                }
            };
            if matches!(rank, RankPolicy::Trace) && n_tenors > 6 {
                return Err(Error::Config(
                    "vecm trace policy supports at most 6 tenors".into(),
                ));
            }
            if let RankPolicy::Fixed(r) = rank {
                if r > n_tenors {
                    return Err(Error::Config(format!(
                        "vecm fixed rank {r} exceeds the {n_tenors}-tenor panel"
                    )));
                }
            }
            ModelKind::Vecm { max_lag, rank }
        }
        "external" => {
            let command = raw
                .command
                .clone()
                .filter(|c| !c.is_empty())
                .ok_or_else(|| Error::Config("external model needs a command".into()))?;
            let config_json = match &raw.config {
                None => serde_json::Value::Null,
                Some(v) => toml_to_json(v),
            };
            ModelKind::External {
                adapter: ExternalModelConfig {
                    command,
                    args: raw.args.clone().unwrap_or_default(),
                    timeout_secs: raw.timeout_secs.unwrap_or_else(default_adapter_timeout),
                    config: config_json,
                },
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown model kind {other:?} (expected naive, naive-mean, seasonal-naive, \
                 arima, dhr-arima, var, vecm, or external)"
            )))
        }
    };

    // VAR is benchmarked on differenced input (diff+VAR), so that is its
    // default; VECM consumes levels by construction.
    let stationary_default = matches!(kind, ModelKind::Var { .. });
    let stationary_input = raw.stationary_input.unwrap_or(stationary_default);
    if stationary_input && matches!(kind, ModelKind::Vecm { .. }) {
        return Err(Error::Config(
            "vecm consumes level input; stationary_input = true is invalid".into(),
        ));
    }

    let id = raw.id.clone().unwrap_or_else(|| kind.name().to_string());
    if id.is_empty() || id.contains(',') || id.contains(char::is_whitespace) {
        return Err(Error::Config(format!(
            "model id {id:?} must be nonempty without commas or whitespace"
        )));
    }
    Ok(ModelEntry {
        id,
        kind,
        stationary_input,
    })
}

fn toml_to_json(value: &toml::Value) -> serde_json::Value {
    match value {
        toml::Value::String(s) => serde_json::Value::String(s.clone()),
        toml::Value::Integer(i) => serde_json::Value::from(*i),
        toml::Value::Float(f) => serde_json::Value::from(*f),
        toml::Value::Boolean(b) => serde_json::Value::Bool(*b),
        toml::Value::Datetime(d) => serde_json::Value::String(d.to_string()),
        toml::Value::Array(items) => {
            serde_json::Value::Array(items.iter().map(toml_to_json).collect())
        }
        toml::Value::Table(table) => serde_json::Value::Object(
            table
                .iter()
                .map(|(k, v)| (k.clone(), toml_to_json(v)))
                .collect(),
        ),
    }
}
