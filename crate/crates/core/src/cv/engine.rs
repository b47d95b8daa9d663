use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Mutex;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::blocks::assign_blocks;
use super::config::{ExperimentConfig, ModelEntry, ModelKind};
use super::windows::{generate_windows, Scheme, WindowPlan};
use crate::data::{align_panel, slice_window, AlignmentOptions, SeriesWindow, YieldPanel};
use crate::forecast::{
    arima_fit, arima_forecast, auto_arima, dhr_arima_fit, dhr_arima_forecast, fourier_residuals,
    naive_last, naive_mean, seasonal_naive, var_fit, var_forecast, var_order_select, vecm_fit,
    vecm_forecast, ArimaSearch, DifferencePolicy, HyperParams, OrderCriterion,
};
use crate::numerics::Matrix;
use crate::report::{mape, parse_windows_csv, rmse};
use crate::transforms::{difference, integrate_forecast, IntegrationState};
use crate::{Error, Result};

/// Outcome class of one scored window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResultStatus {
    /// Scored with the intended model.
    Ok,
    /// The model failed to fit; scored with the naive fallback.
    Fallback,
    /// An adapter failed; the window carries no scores.
    Skipped,
}

/// Per-window scores for one model on one tenor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    pub model_id: String,
    pub hyperparams: HyperParams,
    pub scheme: Scheme,
    pub stationary_input: bool,
    pub block: usize,
    pub window_index: usize,
    pub train_start: NaiveDate,
    pub train_end: NaiveDate,
    pub tenor: String,
    pub horizon: usize,
    /// NaN for skipped windows.
    pub rmse: f64,
    /// NaN for skipped windows.
    pub mape: f64,
    pub status: ResultStatus,
    pub seed: u64,
}

/// Hyperparameters frozen for one (model, block[, tenor]) and how they were
/// obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParamRecord {
    pub model_id: String,
    pub block: usize,
    /// None for multivariate models and tenor-independent benchmarks.
    pub tenor: Option<String>,
    pub hyperparams: HyperParams,
    /// True when the search failed and an earlier block (or the default)
    /// was used instead.
    pub fallback: bool,
}

/// Everything embedded in emitted outputs to make a run reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunProvenance {
    pub seed: u64,
    pub config_hash: String,
    pub version: String,
    pub scheme: Scheme,
    pub horizon: usize,
    pub window_count: usize,
    pub tenors: Vec<String>,
    pub panel_start: NaiveDate,
    pub panel_end: NaiveDate,
    pub hyperparams: Vec<HyperParamRecord>,
}

/// Results of one full experiment run, order-stabilized by
/// (window, model, tenor).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub results: Vec<WindowResult>,
    pub plan: WindowPlan,
    pub block_ids: Vec<usize>,
    pub provenance: RunProvenance,
}

impl RunOutput {
    pub fn fallback_windows(&self) -> usize {
        self.results
            .iter()
            .filter(|r| r.status == ResultStatus::Fallback)
            .count()
    }

    pub fn skipped_windows(&self) -> usize {
        self.results
            .iter()
            .filter(|r| r.status == ResultStatus::Skipped)
            .count()
    }
}

/// Loads and aligns the configured panel from cache (and network when the
/// `fetch` feature is enabled and the run is not offline).
pub fn load_panel(config: &ExperimentConfig) -> Result<YieldPanel> {
    let mut series = Vec::with_capacity(config.data.tickers.len());
    for ticker in &config.data.tickers {
        series.push(load_series(config, ticker)?);
    }
    align_panel(
        &series,
        &AlignmentOptions {
            tenors: config.data.tickers.clone(),
            start: config.data.start,
            end: config.data.end,
            policy: config.data.fill_policy,
            max_routine_gap: config.data.max_routine_gap,
        },
    )
}

#[cfg(feature = "fetch")]
fn load_series(config: &ExperimentConfig, ticker: &str) -> Result<crate::data::RawSeries> {
    let options = if config.data.offline {
        crate::data::FetchOptions::Offline
    } else {
        crate::data::FetchOptions::PreferCache
    };
    crate::data::fetch_series(
        ticker,
        &config.data.endpoint,
        &config.data.cache_dir,
        options,
        &config.data.tickers,
    )
}

#[cfg(not(feature = "fetch"))]
fn load_series(config: &ExperimentConfig, ticker: &str) -> Result<crate::data::RawSeries> {
    crate::data::load_cached_series(&config.data.cache_dir, ticker)?.ok_or_else(|| Error::Fetch {
        ticker: ticker.to_string(),
        message: format!(
            "no cached payload under {} (built without the fetch feature)",
            config.data.cache_dir.display()
        ),
    })
}

type HpKey = (usize, usize, Option<usize>); // (model index, block, tenor index)

struct Prepared {
    hp: BTreeMap<HpKey, HyperParams>,
    records: Vec<HyperParamRecord>,
}

/// Runs the full walk-forward experiment over the given panel.
///
/// Hyperparameters are selected on the first training window of each time
/// block and frozen for the block; windows are evaluated independently
/// (in parallel when the `parallel` feature is enabled and
/// `run.parallelism` allows), and results come back in deterministic order
/// regardless of scheduling. When `checkpoint` names a file, completed
/// (model, window, tenor) rows are journaled there and a rerun resumes
/// from them if the config hash matches.
pub fn run_experiment(
    config: &ExperimentConfig,
    panel: &YieldPanel,
    checkpoint: Option<&Path>,
) -> Result<RunOutput> {
    let config_hash = config.hash();
    let plan = generate_windows(
        panel.len(),
        config.protocol.scheme,
        config.protocol.train_window,
        config.protocol.step,
        config.protocol.horizon,
    )?;
    let block_ids = assign_blocks(&plan, &config.blocks, panel.index())?;

    let prepared = select_all_hyperparams(config, panel, &plan, &block_ids)?;

    // Resume support: previously completed rows keyed by (model, window, tenor).
    let mut done: BTreeMap<(String, usize, String), WindowResult> = BTreeMap::new();
    if let Some(path) = checkpoint {
        if path.exists() {
            let text = fs::read_to_string(path)?;
            if let Ok((rows, Some(prov))) = parse_windows_csv(&text) {
                if prov.config_hash == config_hash {
                    for mut row in rows {
                        // Hyperparams are not journaled; reattach from the
                        // freshly recomputed per-block log.
                        let model_idx = config.models.iter().position(|m| m.id == row.model_id);
                        if let Some(mi) = model_idx {
                            let tenor_idx = panel.tenor_position(&row.tenor);
                            let key_tenor = if hyperparams_per_tenor(&config.models[mi].kind) {
                                tenor_idx
                            } else {
                                None
                            };
                            if let Some(hp) = prepared.hp.get(&(mi, row.block, key_tenor)).cloned()
                            {
                                row.hyperparams = hp;
                            }
                            done.insert(
                                (row.model_id.clone(), row.window_index, row.tenor.clone()),
                                row,
                            );
                        }
                    }
                }
            }
        }
    }

    // Task list: multivariate models score all tenors per window in one fit.
    struct Task {
        model_idx: usize,
        window_idx: usize,
        tenor_idx: Option<usize>,
    }
    let mut tasks = Vec::new();
    for (model_idx, model) in config.models.iter().enumerate() {
        for window_idx in 0..plan.windows.len() {
            if model.kind.is_multivariate() {
                let all_done = (0..panel.n_tenors()).all(|j| {
                    done.contains_key(&(model.id.clone(), window_idx, panel.tenors()[j].clone()))
                });
                if !all_done {
                    tasks.push(Task {
                        model_idx,
                        window_idx,
                        tenor_idx: None,
                    });
                }
            } else {
                for j in 0..panel.n_tenors() {
                    if !done.contains_key(&(
                        model.id.clone(),
                        window_idx,
                        panel.tenors()[j].clone(),
                    )) {
                        tasks.push(Task {
                            model_idx,
                            window_idx,
                            tenor_idx: Some(j),
                        });
                    }
                }
            }
        }
    }

    let journal: Option<Mutex<fs::File>> = match checkpoint {
        Some(path) => {
            let fresh = !path.exists() || done.is_empty();
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            let mut file = fs::OpenOptions::new()
                .create(true)
                .append(!fresh)
                .write(true)
                .truncate(fresh)
                .open(path)?;
            if fresh {
                writeln!(
                    file,
                    "# curvecast {} config_hash={config_hash} seed={} tenors={}",
                    crate::VERSION,
                    config.run.seed,
                    panel.tenors().join(",")
                )?;
                writeln!(file, "{}", crate::report::WINDOWS_CSV_HEADER)?;
            }
            Some(Mutex::new(file))
        }
        None => None,
    };

    let run_task = |task: &Task| -> Result<Vec<WindowResult>> {
        let model = &config.models[task.model_idx];
        let window = slice_window(
            panel,
            plan.windows[task.window_idx].train_start,
            plan.windows[task.window_idx].train_end - plan.windows[task.window_idx].train_start,
            plan.horizon,
        )?;
        let block = block_ids[task.window_idx];
        let rows = match task.tenor_idx {
            Some(j) => vec![run_univariate_task(
                config,
                task.model_idx,
                model,
                &prepared,
                &window,
                task.window_idx,
                block,
                j,
            )?],
            None => run_multivariate_task(
                config,
                task.model_idx,
                model,
                &prepared,
                &window,
                task.window_idx,
                block,
            )?,
        };
        if let Some(journal) = &journal {
            let mut guard = journal.lock().expect("journal lock");
            for row in &rows {
                writeln!(guard, "{}", crate::report::render_windows_csv_row(row))?;
            }
            guard.flush()?;
        }
        Ok(rows)
    };

    let fresh_results = execute(config.run.parallelism, &tasks, run_task)?;

    // Keyed merge: a partially journaled multivariate window re-runs all of
    // its tenors, so fresh rows replace any resumed duplicates.
    let mut merged = done;
    for row in fresh_results.into_iter().flatten() {
        merged.insert(
            (row.model_id.clone(), row.window_index, row.tenor.clone()),
            row,
        );
    }
    let mut results: Vec<WindowResult> = merged.into_values().collect();
    results.sort_by(|a, b| {
        (a.window_index, &a.model_id, &a.tenor).cmp(&(b.window_index, &b.model_id, &b.tenor))
    });

    let provenance = RunProvenance {
        seed: config.run.seed,
        config_hash,
        version: crate::VERSION.to_string(),
        scheme: plan.scheme,
        horizon: plan.horizon,
        window_count: plan.windows.len(),
        tenors: panel.tenors().to_vec(),
        panel_start: panel.index()[0],
        panel_end: *panel.index().last().expect("nonempty panel"),
        hyperparams: prepared.records.clone(),
    };

    Ok(RunOutput {
        results,
        plan,
        block_ids,
        provenance,
    })
}

#[cfg(feature = "parallel")]
fn execute<T: Sync>(
    parallelism: usize,
    tasks: &[T],
    run: impl Fn(&T) -> Result<Vec<WindowResult>> + Sync,
) -> Result<Vec<Vec<WindowResult>>> {
    use rayon::prelude::*;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if parallelism > 0 {
        builder = builder.num_threads(parallelism);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| tasks.par_iter().map(&run).collect())
}

#[cfg(not(feature = "parallel"))]
fn execute<T>(
    _parallelism: usize,
    tasks: &[T],
    run: impl Fn(&T) -> Result<Vec<WindowResult>>,
) -> Result<Vec<Vec<WindowResult>>> {
    tasks.iter().map(run).collect()
}

fn hyperparams_per_tenor(kind: &ModelKind) -> bool {
    matches!(kind, ModelKind::Arima { .. } | ModelKind::DhrArima { .. })
}

fn default_hyperparams(model: &ModelEntry) -> HyperParams {
    match &model.kind {
        ModelKind::Naive | ModelKind::NaiveMean => HyperParams::None,
        ModelKind::SeasonalNaive { season } => HyperParams::SeasonalNaive { season: *season },
        ModelKind::Arima { .. } => HyperParams::Arima {
            p: 0,
            d: usize::from(!model.stationary_input),
            q: 0,
        },
        ModelKind::DhrArima {
            period, harmonics, ..
        } => HyperParams::DhrArima {
            p: 0,
            d: usize::from(!model.stationary_input),
            q: 0,
            period: *period,
            harmonics: *harmonics,
        },
        ModelKind::Var { .. } => HyperParams::Var { lag: 1 },
        ModelKind::Vecm { rank, .. } => HyperParams::Vecm {
            lag: 1,
            rank_policy: *rank,
        },
        ModelKind::External { adapter } => HyperParams::External {
            command: adapter.command.clone(),
            config: adapter.config.clone(),
        },
    }
}

/// The model's training input: differenced per tenor when the entry is
/// flagged stationary.
fn stationary_input(train: &[f64]) -> Result<(Vec<f64>, IntegrationState)> {
    difference(train, 1)
}

fn search_hyperparams(
    model: &ModelEntry,
    window: &SeriesWindow<'_>,
    tenor_idx: Option<usize>,
) -> Result<HyperParams> {
    match &model.kind {
        ModelKind::Naive | ModelKind::NaiveMean => Ok(HyperParams::None),
        ModelKind::SeasonalNaive { season } => Ok(HyperParams::SeasonalNaive { season: *season }),
        ModelKind::Arima { max_p, max_q } => {
            let j = tenor_idx.expect("arima search is per tenor");
            let train = window.train_series(j);
            let (input, d_policy) = if model.stationary_input {
                (stationary_input(&train)?.0, DifferencePolicy::Fixed(0))
            } else {
                (train, DifferencePolicy::SearchLevel)
            };
            let (p, d, q) = auto_arima(
                &input,
                &ArimaSearch {
                    max_p: *max_p,
                    max_q: *max_q,
                    d: d_policy,
                },
            )?;
            Ok(HyperParams::Arima { p, d, q })
        }
        ModelKind::DhrArima {
            period,
            harmonics,
            max_p,
            max_q,
        } => {
            let j = tenor_idx.expect("dhr search is per tenor");
            let train = window.train_series(j);
            let (input, d_policy) = if model.stationary_input {
                (stationary_input(&train)?.0, DifferencePolicy::Fixed(0))
            } else {
                (train, DifferencePolicy::SearchLevel)
            };
            let residuals = fourier_residuals(&input, *period, *harmonics)?;
            let (p, d, q) = auto_arima(
                &residuals,
                &ArimaSearch {
                    max_p: *max_p,
                    max_q: *max_q,
                    d: d_policy,
                },
            )?;
            Ok(HyperParams::DhrArima {
                p,
                d,
                q,
                period: *period,
                harmonics: *harmonics,
            })
        }
        ModelKind::Var { max_lag } => {
            let input = multivariate_input(model, window)?.0;
            let lag = var_order_select(&input, *max_lag, OrderCriterion::Aic)?;
            Ok(HyperParams::Var { lag })
        }
        ModelKind::Vecm { max_lag, rank } => {
            let input = window.train_matrix();
            let lag = var_order_select(&input, *max_lag, OrderCriterion::Aic)?;
            Ok(HyperParams::Vecm {
                lag,
                rank_policy: *rank,
            })
        }
        ModelKind::External { adapter } => Ok(HyperParams::External {
            command: adapter.command.clone(),
            config: adapter.config.clone(),
        }),
    }
}

fn select_all_hyperparams(
    config: &ExperimentConfig,
    panel: &YieldPanel,
    plan: &WindowPlan,
    block_ids: &[usize],
) -> Result<Prepared> {
    // First window of each block, in block order.
    let mut first_window: BTreeMap<usize, usize> = BTreeMap::new();
    for (w, b) in block_ids.iter().enumerate() {
        first_window.entry(*b).or_insert(w);
    }

    let mut hp = BTreeMap::new();
    let mut records = Vec::new();
    for (model_idx, model) in config.models.iter().enumerate() {
        let tenor_slots: Vec<Option<usize>> = if hyperparams_per_tenor(&model.kind) {
            (0..panel.n_tenors()).map(Some).collect()
        } else {
            vec![None]
        };
        for slot in tenor_slots {
            let mut last_good: Option<HyperParams> = None;
            for (&block, &window_idx) in &first_window {
                let span = &plan.windows[window_idx];
                let window = slice_window(
                    panel,
                    span.train_start,
                    span.train_end - span.train_start,
                    plan.horizon,
                )?;
                let (params, fallback) = match search_hyperparams(model, &window, slot) {
                    Ok(p) => (p, false),
                    Err(_) => (
                        last_good
                            .clone()
                            .unwrap_or_else(|| default_hyperparams(model)),
                        true,
                    ),
                };
                if !fallback {
                    last_good = Some(params.clone());
                }
                records.push(HyperParamRecord {
                    model_id: model.id.clone(),
                    block,
                    tenor: slot.map(|j| panel.tenors()[j].clone()),
                    hyperparams: params.clone(),
                    fallback,
                });
                hp.insert((model_idx, block, slot), params);
            }
        }
    }
    Ok(Prepared { hp, records })
}

fn lookup_hp<'a>(
    prepared: &'a Prepared,
    model_idx: usize,
    block: usize,
    kind: &ModelKind,
    tenor_idx: Option<usize>,
) -> &'a HyperParams {
    let key_tenor = if hyperparams_per_tenor(kind) {
        tenor_idx
    } else {
        None
    };
    prepared
        .hp
        .get(&(model_idx, block, key_tenor))
        .expect("hyperparams exist for every (model, block)")
}

/// Differenced panel columns plus per-tenor integration anchors.
fn multivariate_input(
    model: &ModelEntry,
    window: &SeriesWindow<'_>,
) -> Result<(Matrix, Option<Vec<IntegrationState>>)> {
    let levels = window.train_matrix();
    if !model.stationary_input {
        return Ok((levels, None));
    }
    let m = levels.cols();
    let n = levels.rows();
    let mut states = Vec::with_capacity(m);
    let mut diffed = Matrix::zeros(n - 1, m);
    for j in 0..m {
        let col = levels.col(j);
        let (d, state) = difference(&col, 1)?;
        for (i, v) in d.iter().enumerate() {
            diffed.set(i, j, *v);
        }
        states.push(state);
    }
    Ok((diffed, Some(states)))
}

fn univariate_model_forecast(
    kind: &ModelKind,
    hp: &HyperParams,
    train: &[f64],
    h: usize,
    stationary: bool,
) -> Result<Vec<f64>> {
    let (input, state) = if stationary {
        let (i, s) = stationary_input(train)?;
        (i, Some(s))
    } else {
        (train.to_vec(), None)
    };
    let forecast = match (kind, hp) {
        (ModelKind::Naive, _) => naive_last(&input, h)?,
        (ModelKind::NaiveMean, _) => naive_mean(&input, h)?,
        (ModelKind::SeasonalNaive { .. }, HyperParams::SeasonalNaive { season }) => {
            seasonal_naive(&input, h, *season)?
        }
        (ModelKind::Arima { .. }, HyperParams::Arima { p, d, q }) => {
            let model = arima_fit(&input, *p, *d, *q)?;
            arima_forecast(&model, h)
        }
        (
            ModelKind::DhrArima { .. },
            HyperParams::DhrArima {
                p,
                d,
                q,
                period,
                harmonics,
            },
        ) => {
            let model = dhr_arima_fit(&input, *period, *harmonics, (*p, *d, *q))?;
            dhr_arima_forecast(&model, h)
        }
        (kind, hp) => {
            return Err(Error::Config(format!(
                "model kind {} cannot run with hyperparams {}",
                kind.name(),
                hp.summary()
            )))
        }
    };
    match state {
        Some(state) => integrate_forecast(&forecast, &state),
        None => Ok(forecast),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_univariate_task(
    config: &ExperimentConfig,
    model_idx: usize,
    model: &ModelEntry,
    prepared: &Prepared,
    window: &SeriesWindow<'_>,
    window_idx: usize,
    block: usize,
    tenor_idx: usize,
) -> Result<WindowResult> {
    let tenor = window.panel().tenors()[tenor_idx].clone();
    let hp = lookup_hp(prepared, model_idx, block, &model.kind, Some(tenor_idx)).clone();
    let train = window.train_series(tenor_idx);
    let actual = window.test_series(tenor_idx);
    let h = window.horizon();

    let (forecast, status) = match &model.kind {
        ModelKind::External { adapter } => {
            match adapter_forecast(config, model, adapter, window, tenor_idx, &tenor, h) {
                Ok(f) => (Some(f), ResultStatus::Ok),
                Err(Error::Adapter(_)) => (None, ResultStatus::Skipped),
                Err(other) => return Err(other),
            }
        }
        kind => match univariate_model_forecast(kind, &hp, &train, h, model.stationary_input) {
            Ok(f) => (Some(f), ResultStatus::Ok),
            Err(Error::Config(e)) => return Err(Error::Config(e)),
            Err(_) => (Some(naive_last(&train, h)?), ResultStatus::Fallback),
        },
    };

    let span = window.train_dates();
    let (r, m) = match &forecast {
        Some(f) => (rmse(&actual, f)?, mape(&actual, f)?),
        None => (f64::NAN, f64::NAN),
    };
    Ok(WindowResult {
        model_id: model.id.clone(),
        hyperparams: hp,
        scheme: config.protocol.scheme,
        stationary_input: model.stationary_input,
        block,
        window_index: window_idx,
        train_start: span[0],
        train_end: *span.last().expect("nonempty train"),
        tenor,
        horizon: h,
        rmse: r,
        mape: m,
        status,
        seed: config.run.seed,
    })
}

#[cfg(feature = "adapter")]
#[allow(clippy::too_many_arguments)]
fn adapter_forecast(
    config: &ExperimentConfig,
    model: &ModelEntry,
    adapter: &super::config::ExternalModelConfig,
    window: &SeriesWindow<'_>,
    tenor_idx: usize,
    tenor: &str,
    h: usize,
) -> Result<Vec<f64>> {
    use crate::forecast::{external_forecast, AdapterConfig, AdapterRequest};
    let train = window.train_series(tenor_idx);
    let request = AdapterRequest {
        protocol: 1,
        model_config: &adapter.config,
        tenor,
        horizon: h,
        train_dates: window.train_dates().iter().map(|d| d.to_string()).collect(),
        train_values: &train,
        stationary_input: model.stationary_input,
        seed: config.run.seed,
    };
    let adapter_config = AdapterConfig {
        command: adapter.command.clone(),
        args: adapter.args.clone(),
        timeout_secs: adapter.timeout_secs,
        config: adapter.config.clone(),
    };
    external_forecast(&adapter_config, &request)
}

#[cfg(not(feature = "adapter"))]
#[allow(clippy::too_many_arguments)]
fn adapter_forecast(
    _config: &ExperimentConfig,
    _model: &ModelEntry,
    _adapter: &super::config::ExternalModelConfig,
    _window: &SeriesWindow<'_>,
    _tenor_idx: usize,
    _tenor: &str,
    _h: usize,
) -> Result<Vec<f64>> {
    Err(Error::Config("built without the adapter feature".into()))
}

fn run_multivariate_task(
    config: &ExperimentConfig,
    model_idx: usize,
    model: &ModelEntry,
    prepared: &Prepared,
    window: &SeriesWindow<'_>,
    window_idx: usize,
    block: usize,
) -> Result<Vec<WindowResult>> {
    let hp = lookup_hp(prepared, model_idx, block, &model.kind, None).clone();
    let h = window.horizon();
    let panel = window.panel();
    let m = panel.n_tenors();

    // h×m level-space forecasts, or per-tenor fallback on fit failure.
    let forecast: Result<Matrix> = (|| match (&model.kind, &hp) {
        (ModelKind::Var { .. }, HyperParams::Var { lag }) => {
            let (input, states) = multivariate_input(model, window)?;
            let fitted = var_fit(&input, *lag)?;
            let raw = var_forecast(&fitted, &input, h)?;
            match states {
                None => Ok(raw),
                Some(states) => {
                    let mut levels = Matrix::zeros(h, m);
                    for (j, state) in states.iter().enumerate() {
                        let col: Vec<f64> = (0..h).map(|i| raw.get(i, j)).collect();
                        let integrated = integrate_forecast(&col, state)?;
                        for (i, v) in integrated.iter().enumerate() {
                            levels.set(i, j, *v);
                        }
                    }
                    Ok(levels)
                }
            }
        }
        (ModelKind::Vecm { .. }, HyperParams::Vecm { lag, rank_policy }) => {
            let levels = window.train_matrix();
            let fitted = vecm_fit(&levels, *lag, *rank_policy)?;
            vecm_forecast(&fitted, &levels, h)
        }
        _ => Err(Error::Config(format!(
            "model kind {} cannot run with hyperparams {}",
            model.kind.name(),
            hp.summary()
        ))),
    })();

    let span = window.train_dates();
    let (train_start, train_end) = (span[0], *span.last().expect("nonempty train"));
    let mut rows = Vec::with_capacity(m);
    for j in 0..m {
        let actual = window.test_series(j);
        let (values, status) = match &forecast {
            Ok(f) => (
                (0..h).map(|i| f.get(i, j)).collect::<Vec<f64>>(),
                ResultStatus::Ok,
            ),
            Err(Error::Config(e)) => return Err(Error::Config(e.clone())),
            Err(_) => (
                naive_last(&window.train_series(j), h)?,
                ResultStatus::Fallback,
            ),
        };
        rows.push(WindowResult {
            model_id: model.id.clone(),
            hyperparams: hp.clone(),
            scheme: config.protocol.scheme,
            stationary_input: model.stationary_input,
            block,
            window_index: window_idx,
            train_start,
            train_end,
            tenor: panel.tenors()[j].clone(),
            horizon: h,
            rmse: rmse(&actual, &values)?,
            mape: mape(&actual, &values)?,
            status,
            seed: config.run.seed,
        });
    }
    Ok(rows)
}
