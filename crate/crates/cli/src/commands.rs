use std::fmt::Write as _;
use std::path::Path;

use cropcast_core::diagnostics;
use cropcast_core::estimation::{self, DiscretizedSeries, N_CLIMATE_STATES};
use cropcast_core::hmm::{self, ForecastMode, ViterbiPath};
use cropcast_core::lstm::{self, TrainOutcome};
use cropcast_core::metrics::{self, MetricsReport, TABLE_HEADER};
use cropcast_core::{reference, ClimateYieldRecord, HmmParams, LabelSet, ThresholdPolicy};

use crate::archive::{ArchivedModel, HmmArchive, LstmArchive, ModelArchive, HMM_FILE, LSTM_FILE};
use crate::config::{ForecastStart, HmmSettings, LstmSettings, RunConfig};
use crate::error::{AtStage, CliError, CliResult, Stage};
use crate::input::{self, InputData};

/// What a command prints. Diagnostics go to standard error and to
/// `<out>/<command>_diagnostics.txt`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub stdout: String,
    pub diagnostics: Vec<String>,
}

/// Input series in discretized form, plus the raw records when available.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub series: DiscretizedSeries,
    pub raw: Option<Vec<ClimateYieldRecord>>,
    pub notes: Vec<String>,
}

pub fn prepare(config: &RunConfig) -> CliResult<Prepared> {
    let path = config.input_path()?;
    let mut notes = Vec::new();
    match input::load_csv(path)? {
        InputData::Raw(records) => {
            let policy = config.thresholds.map_or(ThresholdPolicy::Quantile, ThresholdPolicy::Explicit);
            let series = estimation::discretize(&records, &policy).at(Stage::Discretize)?;
            Ok(Prepared { series, raw: Some(records), notes })
        }
        InputData::Labeled(series) => {
            if config.thresholds.is_some() {
                notes.push("input is already labelled; configured thresholds were not used".into());
            }
            Ok(Prepared { series, raw: None, notes })
        }
    }
}

fn ensure_out_dir(config: &RunConfig) -> CliResult<()> {
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| CliError::input(Stage::Output, format!("cannot create {}: {e}", config.out_dir.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::input(Stage::Output, format!("cannot write {}: {e}", path.display())))
}

/// Writes the diagnostics file for `command` into the output directory.
pub fn write_diagnostics(config: &RunConfig, command: &str, lines: &[String]) -> CliResult<()> {
    ensure_out_dir(config)?;
    let mut text = String::new();
    for line in lines {
        text.push_str(line);
        text.push('\n');
    }
    write_file(&config.out_path(&format!("{command}_diagnostics.txt")), &text)
}

fn fmt_vec(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", cells.join(", "))
}

fn fmt_matrix(out: &mut String, name: &str, m: &[Vec<f64>]) {
    let _ = writeln!(out, "{name}:");
    for row in m {
        let _ = writeln!(out, "  {}", fmt_vec(row));
    }
}

fn state_labels() -> LabelSet {
    LabelSet::rainfall_temperature()
}

fn symbol_labels() -> LabelSet {
    LabelSet::yield_levels()
}

fn label(set: &LabelSet, i: usize) -> String {
    set.label(i).map_or_else(|| i.to_string(), str::to_string)
}

fn is_reference_series(series: &DiscretizedSeries) -> bool {
    let r = reference::maize_series();
    series.years == r.years && series.states == r.states && series.observations == r.observations
}

// ---------------------------------------------------------------- ingest

pub fn ingest(config: &RunConfig) -> CliResult<Report> {
    let prepared = prepare(config)?;
    let s = &prepared.series;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} rows, years {}-{}",
        s.len(),
        s.years.first().copied().unwrap_or_default(),
        s.years.last().copied().unwrap_or_default()
    );
    match (&prepared.raw, &s.thresholds) {
        (Some(_), Some(t)) => {
            let _ = writeln!(
                out,
                "thresholds: rainfall {} temperature {} yield {} / {}",
                t.rainfall, t.temperature, t.yield_low, t.yield_high
            );
        }
        _ => out.push_str("labelled input, no thresholds\n"),
    }
    let (states, symbols) = (state_labels(), symbol_labels());
    let mut state_counts = vec![0usize; s.n_states];
    let mut symbol_counts = vec![0usize; s.n_symbols];
    for (&st, &o) in s.states.iter().zip(&s.observations) {
        state_counts[st] += 1;
        symbol_counts[o] += 1;
    }
    let sc: Vec<String> = state_counts.iter().enumerate().map(|(i, c)| format!("{}={c}", label(&states, i))).collect();
    let oc: Vec<String> =
        symbol_counts.iter().enumerate().map(|(k, c)| format!("{}={c}", label(&symbols, k))).collect();
    let _ = writeln!(out, "states: {}", sc.join(" "));
    let _ = writeln!(out, "observations: {}", oc.join(" "));

    ensure_out_dir(config)?;
    let path = config.out_path("series.csv");
    write_file(&path, &input::write_labeled(s))?;
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(Report { stdout: out, diagnostics: prepared.notes })
}

// ---------------------------------------------------------------- hmm

/// Counts, re-estimates from a uniform initial distribution, then decodes.
pub fn fit_hmm(series: &DiscretizedSeries, settings: &HmmSettings) -> CliResult<(HmmArchive, Vec<String>)> {
    let counts = estimation::count_estimates(series).at(Stage::Estimate)?;
    let estimate = estimation::estimate_initial_params(&counts, settings.smoothing).at(Stage::Estimate)?;
    let n = series.n_states;
    let start = if settings.update_initial {
        estimate.params.clone()
    } else {
        estimate.params.with_initial(vec![1.0 / n as f64; n]).at(Stage::Estimate)?
    };
    let report = hmm::baum_welch(&start, &series.observations, &settings.baum_welch()).at(Stage::TrainHmm)?;
    if !report.final_log_likelihood().is_finite() {
        return Err(CliError::numeric(
            Stage::TrainHmm,
            "the observation sequence has zero probability under the initial model",
        ));
    }
    report.params.validate().into_result().at(Stage::TrainHmm)?;
    let path = hmm::viterbi(&report.params, &series.observations).at(Stage::Decode)?;
    let agreement = hmm::match_fraction(&path.states, &series.states).at(Stage::Decode)?;

    let mut notes = Vec::new();
    let states = state_labels();
    for &i in &estimate.zero_transition_rows {
        notes.push(format!("state {} never transitions; its counted A row was set to uniform", label(&states, i)));
    }
    for &i in &estimate.zero_emission_rows {
        notes.push(format!("state {} never occurs; its counted B row was set to uniform", label(&states, i)));
    }
    for &i in &report.stale_transition_rows {
        notes.push(format!(
            "state {} had zero expected transitions; A row kept from the previous iteration",
            label(&states, i)
        ));
    }
    for &i in &report.stale_emission_rows {
        notes.push(format!(
            "state {} had zero expected occupancy; B row kept from the previous iteration",
            label(&states, i)
        ));
    }
    if !report.converged {
        notes.push(format!(
            "Baum-Welch stopped at the iteration cap ({}) before reaching tol {}",
            report.iterations, settings.tol
        ));
    }

    let archive = HmmArchive {
        settings: settings.clone(),
        series: series.clone(),
        counts,
        counted: estimate.params,
        trained: report.params,
        iterations: report.iterations,
        converged: report.converged,
        log_lik_trace: report.log_lik_trace,
        stale_transition_rows: report.stale_transition_rows,
        stale_emission_rows: report.stale_emission_rows,
        decoded: path.states,
        decoded_log_probability: path.log_probability,
        match_fraction: agreement,
    };
    Ok((archive, notes))
}

/// Comparison lines against the published model when the archive was fitted
/// to the bundled 1990-2021 series.
pub fn hmm_reference_diagnostics(a: &HmmArchive) -> Vec<String> {
    if !is_reference_series(&a.series) {
        return Vec::new();
    }
    let mut out = diagnostics::compare_matrix(
        "counted pi",
        &[a.counted.initial().to_vec()],
        &[reference::COUNTED_INITIAL.to_vec()],
        5e-5,
    );
    out.extend(diagnostics::compare_matrix(
        "counted A",
        a.counted.transition(),
        &reference::to_rows(&reference::COUNTED_TRANSITION),
        5e-5,
    ));
    out.extend(diagnostics::emission_count_diagnostics(&a.counts, &symbol_labels()));
    out.extend(diagnostics::compare_matrix(
        "counted B",
        a.counted.emission(),
        &reference::to_rows(&reference::COUNTED_EMISSION),
        5e-5,
    ));
    out.extend(diagnostics::trained_model_diagnostics(&a.trained));
    let path = ViterbiPath { states: a.decoded.clone(), log_probability: a.decoded_log_probability };
    out.extend(diagnostics::decode_diagnostics(&path, &a.series.states, a.match_fraction));
    out
}

fn hmm_summary(a: &HmmArchive) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "counted pi: {}", fmt_vec(a.counted.initial()));
    fmt_matrix(&mut out, "counted A", a.counted.transition());
    fmt_matrix(&mut out, "counted B", a.counted.emission());
    let _ = writeln!(out, "trained pi: {}", fmt_vec(a.trained.initial()));
    fmt_matrix(&mut out, "trained A", a.trained.transition());
    fmt_matrix(&mut out, "trained B", a.trained.emission());
    let _ = writeln!(
        out,
        "iterations: {} converged: {} log-likelihood: {:.6}",
        a.iterations,
        a.converged,
        a.log_lik_trace.last().copied().unwrap_or(f64::NEG_INFINITY)
    );
    let states = state_labels();
    let decoded: Vec<String> = a.decoded.iter().map(|&s| label(&states, s)).collect();
    let _ = writeln!(out, "decoded: {}", decoded.join(" "));
    let _ = writeln!(out, "match fraction: {:.4}", a.match_fraction);
    out
}

pub fn train_hmm(config: &RunConfig) -> CliResult<Report> {
    let prepared = prepare(config)?;
    let (archive, mut notes) = fit_hmm(&prepared.series, &config.hmm)?;
    notes.splice(0..0, prepared.notes);
    notes.extend(hmm_reference_diagnostics(&archive));
    let mut out = hmm_summary(&archive);
    ensure_out_dir(config)?;
    let path = config.out_path(HMM_FILE);
    ModelArchive::new(ArchivedModel::Hmm(Box::new(archive))).save(&path)?;
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(Report { stdout: out, diagnostics: notes })
}

// ---------------------------------------------------------------- lstm

/// Feature rows and next-step targets for the network.
///
/// Raw input uses yields (plus rainfall and temperature when enabled).
/// Labelled input uses the level code 1-3 (plus the rainfall and
/// temperature high/low bits when enabled).
pub fn lstm_series(prepared: &Prepared, include_climate: bool) -> (Vec<Vec<f64>>, Vec<f64>) {
    match &prepared.raw {
        Some(records) => records
            .iter()
            .map(|r| {
                let f =
                    if include_climate { vec![r.maize_yield, r.rainfall, r.temperature] } else { vec![r.maize_yield] };
                (f, r.maize_yield)
            })
            .unzip(),
        None => {
            let s = &prepared.series;
            s.states
                .iter()
                .zip(&s.observations)
                .map(|(&st, &o)| {
                    let level = (o + 1) as f64;
                    let f = if include_climate { vec![level, (st / 2) as f64, (st % 2) as f64] } else { vec![level] };
                    (f, level)
                })
                .unzip()
        }
    }
}

pub fn fit_lstm(prepared: &Prepared, settings: &LstmSettings) -> CliResult<(LstmArchive, TrainOutcome)> {
    let (features, targets) = lstm_series(prepared, settings.include_climate);
    let outcome = lstm::train(&features, &targets, &settings.lstm_config()).at(Stage::TrainLstm)?;
    let archive = LstmArchive {
        settings: settings.clone(),
        model: outcome.model.clone(),
        years: prepared.series.years.clone(),
        loss_trace: outcome.loss_trace.clone(),
        final_train_loss: outcome.final_train_loss(),
        final_val_loss: outcome.final_val_loss(),
        n_train_samples: outcome.split.train.len(),
        n_test_samples: outcome.split.test.len(),
    };
    Ok((archive, outcome))
}

fn loss_csv(a: &LstmArchive) -> String {
    let mut out = String::from("epoch,train_loss,val_loss\n");
    for e in &a.loss_trace {
        let _ = writeln!(out, "{},{},{}", e.epoch, e.train_loss, e.val_loss);
    }
    out
}

fn save_lstm(config: &RunConfig, archive: LstmArchive, out: &mut String) -> CliResult<()> {
    ensure_out_dir(config)?;
    let loss_path = config.out_path("lstm_loss.csv");
    write_file(&loss_path, &loss_csv(&archive))?;
    let path = config.out_path(LSTM_FILE);
    ModelArchive::new(ArchivedModel::Lstm(Box::new(archive))).save(&path)?;
    let _ = writeln!(out, "wrote {}", path.display());
    let _ = writeln!(out, "wrote {}", loss_path.display());
    Ok(())
}

pub fn train_lstm(config: &RunConfig) -> CliResult<Report> {
    let prepared = prepare(config)?;
    let (archive, _) = fit_lstm(&prepared, &config.lstm)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "samples: {} train / {} test, epochs: {}",
        archive.n_train_samples,
        archive.n_test_samples,
        archive.loss_trace.len()
    );
    let _ = writeln!(out, "final train loss: {:.6} val loss: {:.6}", archive.final_train_loss, archive.final_val_loss);
    save_lstm(config, archive, &mut out)?;
    Ok(Report { stdout: out, diagnostics: prepared.notes })
}

// ---------------------------------------------------------------- compare

/// Numeric value of each symbol used to turn a predictive distribution into
/// a point prediction: level codes for labelled input, mean training yield
/// per level for raw input.
fn symbol_values(prepared: &Prepared, train_rows: usize) -> Vec<f64> {
    let m = prepared.series.n_symbols;
    match &prepared.raw {
        None => (1..=m).map(|k| k as f64).collect(),
        Some(records) => {
            let rows = &records[..train_rows];
            let overall = rows.iter().map(|r| r.maize_yield).sum::<f64>() / rows.len() as f64;
            (0..m)
                .map(|k| {
                    let bin: Vec<f64> = rows
                        .iter()
                        .zip(&prepared.series.observations)
                        .filter(|(_, &o)| o == k)
                        .map(|(r, _)| r.maize_yield)
                        .collect();
                    if bin.is_empty() {
                        overall
                    } else {
                        bin.iter().sum::<f64>() / bin.len() as f64
                    }
                })
                .collect()
        }
    }
}

fn actual_values(prepared: &Prepared) -> Vec<f64> {
    match &prepared.raw {
        Some(records) => records.iter().map(|r| r.maize_yield).collect(),
        None => prepared.series.observations.iter().map(|&o| (o + 1) as f64).collect(),
    }
}

/// Expected-value predictions for `rows` from a model trained on the prefix
/// before the first of them.
fn hmm_predictions(params: &HmmParams, obs: &[usize], rows: &[usize], values: &[f64]) -> CliResult<Vec<f64>> {
    rows.iter()
        .map(|&r| {
            let dist = hmm::next_symbol_distribution(params, &obs[..r]).map_err(|e| {
                CliError::numeric(
                    Stage::Evaluate,
                    format!("cannot predict row {r}: {e}; a positive hmm.smoothing avoids unseen-symbol zeros"),
                )
            })?;
            Ok(dist.iter().zip(values).map(|(p, v)| p * v).sum())
        })
        .collect()
}

struct Comparison {
    years: Vec<i32>,
    actual: Vec<f64>,
    hmm: Vec<f64>,
    lstm: Vec<f64>,
    hmm_report: MetricsReport,
    lstm_report: MetricsReport,
}

fn fit_hmm_prefix(
    prepared: &Prepared,
    settings: &HmmSettings,
    first_test: usize,
) -> CliResult<(HmmArchive, Vec<String>)> {
    let s = &prepared.series;
    let prefix = DiscretizedSeries {
        years: s.years[..first_test].to_vec(),
        states: s.states[..first_test].to_vec(),
        observations: s.observations[..first_test].to_vec(),
        n_states: s.n_states,
        n_symbols: s.n_symbols,
        thresholds: s.thresholds,
    };
    fit_hmm(&prefix, settings)
}

pub fn compare(config: &RunConfig) -> CliResult<Report> {
    let prepared = prepare(config)?;
    let n = prepared.series.len();
    let w = config.lstm.window_length;
    let min_len = lstm::minimum_series_length(w);
    if n < min_len {
        return Err(CliError::input(
            Stage::TrainLstm,
            format!("series has {n} rows, need at least {min_len} for window length {w}"),
        ));
    }
    let split = lstm::chronological_split(n - w, config.lstm.train_fraction).at(Stage::TrainLstm)?;
    let first_test = w + split.test.start;

    let (full, prefix, lstm_fit) = std::thread::scope(|scope| {
        let lstm_job = scope.spawn(|| fit_lstm(&prepared, &config.lstm));
        let full = fit_hmm(&prepared.series, &config.hmm);
        let prefix = fit_hmm_prefix(&prepared, &config.hmm, first_test);
        let lstm_fit =
            lstm_job.join().unwrap_or_else(|_| Err(CliError::numeric(Stage::TrainLstm, "training thread panicked")));
        (full, prefix, lstm_fit)
    });
    let (full, mut notes) = full?;
    let (prefix, _) = prefix?;
    let (lstm_archive, outcome) = lstm_fit?;
    notes.splice(0..0, prepared.notes.clone());
    notes.extend(hmm_reference_diagnostics(&full));

    let rows = outcome.test_rows.clone();
    debug_assert_eq!(rows.first().copied(), Some(first_test));
    let all_actual = actual_values(&prepared);
    let actual: Vec<f64> = rows.iter().map(|&r| all_actual[r]).collect();
    let values = symbol_values(&prepared, first_test);
    let hmm_pred = hmm_predictions(&prefix.trained, &prepared.series.observations, &rows, &values)?;
    let cmp = Comparison {
        years: rows.iter().map(|&r| prepared.series.years[r]).collect(),
        hmm_report: metrics::evaluate(&actual, &hmm_pred).at(Stage::Evaluate)?,
        lstm_report: metrics::evaluate(&actual, &outcome.test_predictions).at(Stage::Evaluate)?,
        lstm: outcome.test_predictions.clone(),
        hmm: hmm_pred,
        actual,
    };
    for (name, r) in [("HMM", &cmp.hmm_report), ("LSTM", &cmp.lstm_report)] {
        if r.corr.is_none() {
            notes.push(format!("{name} correlation is undefined on the held-out rows (a constant series)"));
        }
    }

    let table = format!("{TABLE_HEADER}\n{}\n{}\n", cmp.hmm_report.table_row("HMM"), cmp.lstm_report.table_row("LSTM"));
    let best = if cmp.lstm_report.rmse < cmp.hmm_report.rmse { "LSTM" } else { "HMM" };
    let mut predictions = String::from("year,actual,hmm,lstm\n");
    for i in 0..cmp.years.len() {
        let _ = writeln!(predictions, "{},{},{},{}", cmp.years[i], cmp.actual[i], cmp.hmm[i], cmp.lstm[i]);
    }

    ensure_out_dir(config)?;
    let mut out = table.clone();
    let _ = writeln!(out, "best={best} by RMSE");
    let _ = writeln!(
        out,
        "held-out years {}-{} ({} rows)",
        cmp.years.first().copied().unwrap_or_default(),
        cmp.years.last().copied().unwrap_or_default(),
        cmp.years.len()
    );
    write_file(&config.out_path("compare.csv"), &table)?;
    write_file(&config.out_path("compare_predictions.csv"), &predictions)?;
    let hmm_path = config.out_path(HMM_FILE);
    ModelArchive::new(ArchivedModel::Hmm(Box::new(full))).save(&hmm_path)?;
    let _ = writeln!(out, "wrote {}", hmm_path.display());
    save_lstm(config, lstm_archive, &mut out)?;
    Ok(Report { stdout: out, diagnostics: notes })
}

// ---------------------------------------------------------------- forecast

pub fn forecast(config: &RunConfig, archive_path: Option<&Path>) -> CliResult<Report> {
    let path = archive_path.map_or_else(|| config.out_path(HMM_FILE), Path::to_path_buf);
    let a = ModelArchive::load(&path, "train-hmm")?.into_hmm(Stage::Forecast)?;
    let settings = &config.forecast;
    let (start, source) = match settings.start {
        ForecastStart::Decoded => (a.decoded.last().copied(), "decoded path"),
        ForecastStart::Recorded => (a.series.states.last().copied(), "recorded states"),
    };
    let start = start.ok_or_else(|| CliError::input(Stage::Forecast, "archive holds an empty series"))?;
    let last_year = *a.series.years.last().expect("non-empty series");
    let steps = hmm::forecast(&a.trained, start, settings.horizon, settings.mode, settings.seed).at(Stage::Forecast)?;

    let (states, symbols) = (state_labels(), symbol_labels());
    let mut out = String::new();
    let mode = match settings.mode {
        ForecastMode::Argmax => "argmax".to_string(),
        ForecastMode::Sample => format!("sample, seed {}", settings.seed),
    };
    let _ = writeln!(
        out,
        "start: {last_year} state {} ({}) from the {source}; mode {mode}",
        start + 1,
        label(&states, start)
    );
    let mut csv = String::from("year,state,observation\n");
    for s in &steps {
        let year = last_year + s.step as i32;
        let _ = writeln!(csv, "{year},{},{}", s.state + 1, label(&symbols, s.observation));
        let _ = writeln!(
            out,
            "{year}: state {} ({}) observation {}",
            s.state + 1,
            label(&states, s.state),
            label(&symbols, s.observation)
        );
    }
    let mut notes = Vec::new();
    if is_reference_series(&a.series) {
        let st: Vec<usize> = steps.iter().map(|s| s.state).collect();
        let ob: Vec<usize> = steps.iter().map(|s| s.observation).collect();
        notes.extend(diagnostics::forecast_diagnostics(start, &st, &ob, &symbols));
    }
    ensure_out_dir(config)?;
    let csv_path = config.out_path("forecast.csv");
    write_file(&csv_path, &csv)?;
    let _ = writeln!(out, "wrote {}", csv_path.display());
    Ok(Report { stdout: out, diagnostics: notes })
}

// ---------------------------------------------------------------- steady state

pub fn steady_state(config: &RunConfig, archive_path: Option<&Path>) -> CliResult<Report> {
    let path = archive_path.map_or_else(|| config.out_path(HMM_FILE), Path::to_path_buf);
    let a = ModelArchive::load(&path, "train-hmm")?.into_hmm(Stage::SteadyState)?;
    let n = a.trained.n_states();
    let states = state_labels();
    let header: Vec<String> = (0..n).map(|i| label(&states, i)).collect();
    let mut csv = format!("matrix,{},iterations,residual\n", header.join(","));
    let mut out = String::new();
    let mut notes = Vec::new();
    let reference_series = is_reference_series(&a.series);
    for (name, m) in [("counted", &a.counted), ("trained", &a.trained)] {
        let ss = hmm::steady_state(m.transition()).at(Stage::SteadyState)?;
        let cells: Vec<String> = ss.distribution.iter().map(|v| format!("{v:.4}")).collect();
        let _ = writeln!(csv, "{name},{},{},{:e}", cells.join(","), ss.iterations, ss.residual);
        let _ = writeln!(
            out,
            "{name} A: {} after {} iterations, residual {:e}",
            fmt_vec(&ss.distribution),
            ss.iterations,
            ss.residual
        );
        match ss.cross_check_gap() {
            Some(gap) if gap > 1e-8 => {
                notes.push(format!("{name} A: power iteration and direct solve differ by {gap:e}"))
            }
            Some(_) => {}
            None => notes
                .push(format!("{name} A: direct solve is singular (reducible chain); power-iteration limit reported")),
        }
        if reference_series {
            notes.extend(diagnostics::steady_state_diagnostics(name, &ss.distribution));
        }
    }
    if reference_series && n == N_CLIMATE_STATES {
        let _ = writeln!(out, "published: {}", fmt_vec(&reference::STEADY_STATE));
    }
    ensure_out_dir(config)?;
    let csv_path = config.out_path("steady_state.csv");
    write_file(&csv_path, &csv)?;
    let _ = writeln!(out, "wrote {}", csv_path.display());
    Ok(Report { stdout: out, diagnostics: notes })
}

// ---------------------------------------------------------------- plot

pub fn plot(config: &RunConfig) -> CliResult<Report> {
    let h = ModelArchive::load(&config.out_path(HMM_FILE), "train-hmm` or `compare")?.into_hmm(Stage::Plot)?;
    let l = ModelArchive::load(&config.out_path(LSTM_FILE), "train-lstm` or `compare")?.into_lstm(Stage::Plot)?;
    let symbols = symbol_labels();
    let s = &h.series;

    let mut fig2 = String::from("year,actual_observation,model_observation\n");
    for t in 0..s.len() {
        let dist = hmm::next_symbol_distribution(&h.trained, &s.observations[..t]).at(Stage::Plot)?;
        let best =
            dist.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (k, &p)| if p > acc.1 { (k, p) } else { acc }).0;
        let _ = writeln!(fig2, "{},{},{}", s.years[t], label(&symbols, s.observations[t]), label(&symbols, best));
    }
    let mut fig3 = String::from("year,recorded_state,decoded_state\n");
    for t in 0..s.len() {
        let _ = writeln!(fig3, "{},{},{}", s.years[t], s.states[t] + 1, h.decoded[t] + 1);
    }

    ensure_out_dir(config)?;
    let mut out = String::new();
    for (name, body) in [("fig2.csv", fig2), ("fig3.csv", fig3), ("fig_loss.csv", loss_csv(&l))] {
        let p = config.out_path(name);
        write_file(&p, &body)?;
        let _ = writeln!(out, "wrote {}", p.display());
    }
    let _ = writeln!(out, "match fraction: {:.4}", h.match_fraction);
    Ok(Report { stdout: out, diagnostics: Vec::new() })
}
