//! Acceptance gate. Each test prints one `PASS` or `FAIL` line; run with
//! `--nocapture` to see them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use cropcast_cli::commands::fit_hmm;
use cropcast_cli::config::HmmSettings;
use cropcast_cli::input::{load_csv, InputData};
use cropcast_core::diagnostics;
use cropcast_core::estimation::{count_estimates, estimate_initial_params, DiscretizedSeries};
use cropcast_core::hmm::{forward, steady_state, validate_params, viterbi, HmmParams};
use cropcast_core::lstm::{backprop, forward_sequence, init_params, train, LstmConfig, LstmParams};
use cropcast_core::metrics::{self, evaluate};
use cropcast_core::reference;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/maize_1990_2021.csv");

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn verdict(id: u32, name: &str, limit: Duration, started: Instant, check: Check) {
    let elapsed = started.elapsed();
    let outcome = check.and_then(|detail| {
        if elapsed <= limit {
            Ok(detail)
        } else {
            Err(format!("{detail}; runtime {:.2}s exceeds {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
        }
    });
    match &outcome {
        Ok(d) => println!("PASS criterion {id} ({name}): {d} [{:.2}s]", elapsed.as_secs_f64()),
        Err(e) => println!("FAIL criterion {id} ({name}): {e} [{:.2}s]", elapsed.as_secs_f64()),
    }
    assert!(outcome.is_ok(), "criterion {id} failed: {}", outcome.unwrap_err());
}

fn fixture_series() -> DiscretizedSeries {
    match load_csv(Path::new(FIXTURE)).expect("fixture parses") {
        InputData::Labeled(s) => s,
        InputData::Raw(_) => panic!("fixture is labelled"),
    }
}

fn cropcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cropcast")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Result<Output, String> {
    let o = cropcast(args);
    if o.status.success() {
        Ok(o)
    } else {
        Err(format!("`cropcast {}` failed: {}", args.join(" "), String::from_utf8_lossy(&o.stderr)))
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

// ------------------------------------------------------------------ 1

#[test]
fn criterion_1_parameter_estimation() {
    let started = Instant::now();
    let check = || -> Check {
        let series = fixture_series();
        ensure!(series.len() == 32, "fixture has {} rows", series.len());
        let counts = count_estimates(&series).map_err(|e| e.to_string())?;
        let est = estimate_initial_params(&counts, 0.0).map_err(|e| e.to_string())?;
        let pi = est.params.initial();
        ensure!(pi == [0.3125, 0.25, 0.25, 0.1875], "pi = {pi:?}");
        let a = est.params.transition();
        for (i, (row, published)) in a.iter().zip(reference::COUNTED_TRANSITION).enumerate() {
            for (x, p) in row.iter().zip(published) {
                ensure!((x - p).abs() <= 5e-5, "A row {} = {row:?}, published {published:?}", i + 1);
            }
        }
        ensure!(a[0] == [0.3, 0.1, 0.4, 0.2], "row LL = {:?}", a[0]);
        ensure!(a[3] == [0.2, 0.2, 0.0, 0.6], "row HH = {:?}", a[3]);

        let dir = TempDir::new().map_err(|e| e.to_string())?;
        let out = dir.path().to_str().unwrap();
        let o = run_ok(&["--input", FIXTURE, "--out", out, "train-hmm", "--max-iter", "1"])?;
        let diag = read(&dir.path().join("train-hmm_diagnostics.txt"))?;
        let stderr = String::from_utf8_lossy(&o.stderr);
        let line = diag
            .lines()
            .find(|l| l.contains("published emission counts match"))
            .ok_or_else(|| format!("emission-count discrepancy not reported:\n{diag}"))?;
        ensure!(stderr.contains(line), "discrepancy missing from standard error");
        Ok(format!("pi exact, A within 4 decimals, reported: \"{line}\""))
    };
    verdict(1, "parameter estimation", Duration::from_secs(1), started, check());
}

// ------------------------------------------------------------------ 2

/// Sum over all paths and the best path (first in lexicographic order on
/// ties), by direct enumeration.
fn enumerate_paths(p: &HmmParams, obs: &[usize]) -> (f64, Vec<usize>, f64) {
    let n = p.n_states();
    let t_len = obs.len();
    let (mut total, mut best, mut best_prob) = (0.0, vec![0; t_len], -1.0);
    for code in 0..n.pow(t_len as u32) {
        let mut path = vec![0; t_len];
        let mut c = code;
        for t in (0..t_len).rev() {
            path[t] = c % n;
            c /= n;
        }
        let prob = path_prob(p, &path, obs);
        total += prob;
        if prob > best_prob {
            best_prob = prob;
            best = path;
        }
    }
    (total, best, best_prob)
}

fn path_prob(p: &HmmParams, path: &[usize], obs: &[usize]) -> f64 {
    let mut prob = p.initial()[path[0]] * p.emission()[path[0]][obs[0]];
    for t in 1..obs.len() {
        prob *= p.transition()[path[t - 1]][path[t]] * p.emission()[path[t]][obs[t]];
    }
    prob
}

/// The multiset of probabilities a path multiplies, sorted.
fn factors(p: &HmmParams, path: &[usize], obs: &[usize]) -> Vec<f64> {
    let mut f = vec![p.initial()[path[0]], p.emission()[path[0]][obs[0]]];
    for t in 1..obs.len() {
        f.push(p.transition()[path[t - 1]][path[t]]);
        f.push(p.emission()[path[t]][obs[t]]);
    }
    f.sort_by(f64::total_cmp);
    f
}

fn random_row(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.random_range(0.01..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

#[test]
fn criterion_2_inference_oracles() {
    let started = Instant::now();
    let check = || -> Check {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n_models = 250;
        let mut ties = 0;
        for case in 0..n_models {
            let n = rng.random_range(1..=3);
            let m = rng.random_range(1..=3);
            let t_len = rng.random_range(1..=8);
            let p = HmmParams::new(
                random_row(&mut rng, n),
                (0..n).map(|_| random_row(&mut rng, n)).collect(),
                (0..n).map(|_| random_row(&mut rng, m)).collect(),
            )
            .map_err(|e| e.to_string())?;
            let obs: Vec<usize> = (0..t_len).map(|_| rng.random_range(0..m)).collect();
            let (total, best, best_prob) = enumerate_paths(&p, &obs);
            let ll = forward(&p, &obs).map_err(|e| e.to_string())?.log_likelihood;
            let rel = (ll - total.ln()).abs() / total.ln().abs().max(f64::MIN_POSITIVE);
            let rel_prob = (ll.exp() - total).abs() / total;
            ensure!(
                rel_prob <= 1e-10,
                "case {case}: forward {} vs enumeration {total} (rel {rel_prob:e}, log rel {rel:e})",
                ll.exp()
            );
            let v = viterbi(&p, &obs).map_err(|e| e.to_string())?;
            if v.states != best {
                // accepted only when both paths multiply the same factors in a
                // different order, i.e. a true tie that rounding split
                ensure!(
                    factors(&p, &v.states, &obs) == factors(&p, &best, &obs),
                    "case {case}: viterbi {:?} ({:e}) vs exhaustive {best:?} ({best_prob:e})",
                    v.states,
                    path_prob(&p, &v.states, &obs)
                );
                ties += 1;
            }
        }
        Ok(format!("{n_models} models, forward within rel 1e-10, viterbi exact ({ties} exact ties)"))
    };
    verdict(2, "inference oracles", Duration::from_secs(30), started, check());
}

// ------------------------------------------------------------------ 3

#[test]
fn criterion_3_em_monotonicity() {
    let started = Instant::now();
    let mut lines = Vec::new();
    let mut check = || -> Check {
        let series = fixture_series();
        let settings = HmmSettings { max_iter: 1000, ..HmmSettings::default() };
        let (archive, _) = fit_hmm(&series, &settings).map_err(|e| e.to_string())?;
        ensure!(archive.trained.initial() == [0.25; 4], "pi moved: {:?}", archive.trained.initial());
        let trace = &archive.log_lik_trace;
        for (i, w) in trace.windows(2).enumerate() {
            ensure!(w[1] >= w[0] - 1e-8, "log-likelihood fell at iteration {}: {} -> {}", i + 1, w[0], w[1]);
        }
        let report = validate_params(&archive.trained, 4, 3).map_err(|e| e.to_string())?;
        ensure!(report.is_valid(), "trained model invalid: {:?}", report);
        ensure!(archive.converged, "not converged after {} iterations", archive.iterations);
        lines = diagnostics::trained_model_diagnostics(&archive.trained);
        ensure!(lines.iter().any(|l| l.contains("1.7809")), "non-stochastic published row not reported: {lines:?}");
        Ok(format!(
            "{} iterations, log-likelihood {:.6}, {} diagnostics against the published model",
            archive.iterations,
            trace.last().unwrap(),
            lines.len()
        ))
    };
    let result = check();
    for l in &lines {
        println!("  diagnostic: {l}");
    }
    verdict(3, "EM monotonicity", Duration::from_secs(10), started, result);
}

// ------------------------------------------------------------------ 4

fn stationarity_residual(s: &[f64], a: &[Vec<f64>]) -> f64 {
    (0..s.len()).map(|j| ((0..s.len()).map(|i| s[i] * a[i][j]).sum::<f64>() - s[j]).abs()).fold(0.0, f64::max)
}

#[test]
fn criterion_4_steady_state() {
    let started = Instant::now();
    let check = || -> Check {
        let analytic = vec![vec![0.9, 0.1], vec![0.2, 0.8]];
        let s = steady_state(&analytic).map_err(|e| e.to_string())?.distribution;
        ensure!((s[0] - 2.0 / 3.0).abs() <= 1e-10 && (s[1] - 1.0 / 3.0).abs() <= 1e-10, "analytic case gave {s:?}");
        let (archive, _) = fit_hmm(&fixture_series(), &HmmSettings::default()).map_err(|e| e.to_string())?;
        let mut parts = Vec::new();
        for (name, a) in [("counted", archive.counted.transition()), ("trained", archive.trained.transition())] {
            let s = steady_state(a).map_err(|e| e.to_string())?.distribution;
            let r = stationarity_residual(&s, a);
            ensure!(r <= 1e-10, "{name}: |sA - s| = {r:e}");
            let cells: Vec<String> = s.iter().map(|v| format!("{v:.4}")).collect();
            parts.push(format!("{name} [{}] residual {r:.1e}", cells.join(", ")));
        }
        let published: Vec<String> = reference::STEADY_STATE.iter().map(|v| format!("{v:.4}")).collect();
        Ok(format!("{}; published [{}]", parts.join("; "), published.join(", ")))
    };
    verdict(4, "steady state", Duration::from_secs(1), started, check());
}

// ------------------------------------------------------------------ 5

fn squared_error(params: &LstmParams, window: &[Vec<f64>], target: f64) -> f64 {
    let y = forward_sequence(params, window).unwrap().prediction;
    (y - target) * (y - target)
}

#[test]
fn criterion_5_lstm_gradient_check() {
    let started = Instant::now();
    let check = || -> Check {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n_configs = 24;
        let mut worst: f64 = 0.0;
        let mut n_params = 0;
        for case in 0..n_configs {
            let config = LstmConfig {
                hidden_size: rng.random_range(1..=4),
                input_size: rng.random_range(1..=2),
                window_length: rng.random_range(1..=3),
                dense_size: if case % 4 == 1 { Some(2) } else { None },
                seed: 100 + case,
                ..LstmConfig::default()
            };
            let params = init_params(&config).map_err(|e| e.to_string())?;
            let window: Vec<Vec<f64>> = (0..config.window_length)
                .map(|_| (0..config.input_size).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let target = rng.random_range(-1.0..1.0);
            let cache = forward_sequence(&params, &window).map_err(|e| e.to_string())?;
            let analytic = backprop(&params, &cache, target, 1);
            let h = 1e-5;
            for k in 0..params.values.len() {
                let (mut plus, mut minus) = (params.clone(), params.clone());
                plus.values[k] += h;
                minus.values[k] -= h;
                let numeric =
                    (squared_error(&plus, &window, target) - squared_error(&minus, &window, target)) / (2.0 * h);
                let a = analytic.values[k];
                let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-4);
                ensure!(err <= 1e-4, "config {case} {config:?}, parameter {k}: analytic {a} numeric {numeric}");
                worst = worst.max(err);
            }
            n_params += params.values.len();
        }
        Ok(format!("{n_configs} configurations, {n_params} parameters, worst relative error {worst:.2e}"))
    };
    verdict(5, "LSTM gradient check", Duration::from_secs(60), started, check());
}

// ------------------------------------------------------------------ 6

#[test]
fn criterion_6_lstm_convergence() {
    let started = Instant::now();
    let check = || -> Check {
        let ys: Vec<f64> = (0..64).map(|i| (2.0 * std::f64::consts::PI * i as f64 / 16.0).sin()).collect();
        let xs: Vec<Vec<f64>> = ys.iter().map(|&v| vec![v]).collect();
        let config = LstmConfig {
            hidden_size: 32,
            epochs: 200,
            learning_rate: 0.01,
            batch_size: Some(8),
            seed: 42,
            ..LstmConfig::default()
        };
        let out = train(&xs, &ys, &config).map_err(|e| e.to_string())?;
        let first = out.loss_trace[0].train_loss;
        let last = out.final_train_loss();
        ensure!(
            last * 10.0 <= first,
            "epoch 1 loss {first:.6}, epoch 200 loss {last:.6}: reduction {:.1}x",
            first / last
        );
        Ok(format!("train loss {first:.5} -> {last:.6} ({:.0}x)", first / last))
    };
    verdict(6, "LSTM convergence", Duration::from_secs(60), started, check());
}

// ------------------------------------------------------------------ 7

#[test]
fn criterion_7_metrics_identities() {
    let started = Instant::now();
    let check = || -> Check {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..500 {
            let n = rng.random_range(1..=40);
            let actual: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..100.0)).collect();
            let predicted: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..150.0)).collect();
            let mse = metrics::mse(&actual, &predicted).map_err(|e| e.to_string())?;
            let rmse = metrics::rmse(&actual, &predicted).map_err(|e| e.to_string())?;
            ensure!(((rmse * rmse - mse) / mse).abs() <= 1e-12, "case {case}: rmse^2 {} vs mse {mse}", rmse * rmse);
        }

        let r = evaluate(&[1.0, 2.0], &[2.0, 4.0]).map_err(|e| e.to_string())?;
        ensure!((r.mape - 100.0).abs() <= 1e-12, "MAPE {}", r.mape);
        ensure!((r.mse - 2.5).abs() <= 1e-12, "MSE {}", r.mse);
        ensure!((r.rmse - 2.5f64.sqrt()).abs() <= 1e-12 && (r.rmse - 1.58114).abs() < 5e-6, "RMSE {}", r.rmse);
        // residuals 1 and 2: sample sd 1/sqrt(2), over sqrt(2)
        ensure!((r.sem - 0.5).abs() <= 1e-12, "SEM {}", r.sem);
        ensure!(r.corr.is_some_and(|c| (c - 1.0).abs() <= 1e-12), "corr {:?}", r.corr);

        // printed to two decimals: each value lies within half a unit
        let consistent = |rmse: f64, mse: f64| {
            let (lo, hi) = ((rmse - 0.005).powi(2), (rmse + 0.005).powi(2));
            hi >= mse - 0.005 && lo <= mse + 0.005
        };
        let [hmm_row, lstm_row] = reference::METRICS;
        ensure!(consistent(hmm_row.rmse, hmm_row.mse), "published HMM row inconsistent");
        let lstm_note = if consistent(lstm_row.rmse, lstm_row.mse) {
            "published LSTM row consistent".to_string()
        } else {
            format!(
                "published LSTM row inconsistent: {}^2 = {:.4} vs MSE {}",
                lstm_row.rmse,
                lstm_row.rmse * lstm_row.rmse,
                lstm_row.mse
            )
        };
        Ok(format!(
            "rmse^2 = mse on 500 random cases, hand vector exact, published HMM {}^2 ~ {}; {lstm_note}",
            hmm_row.rmse, hmm_row.mse
        ))
    };
    verdict(7, "metrics identities", Duration::from_secs(5), started, check());
}

// ------------------------------------------------------------------ 8

fn full_run(dir: &Path) -> Result<(), String> {
    let out = dir.to_str().unwrap();
    run_ok(&["--input", FIXTURE, "--out", out, "compare", "--seed", "3"])?;
    run_ok(&["--out", out, "forecast", "--horizon", "4"])?;
    run_ok(&["--out", out, "steady-state"])?;
    run_ok(&["--out", out, "plot"])?;
    Ok(())
}

fn output_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "txt"))
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_8_end_to_end_determinism() {
    let started = Instant::now();
    let check = || -> Check {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        full_run(a.path())?;
        full_run(b.path())?;
        let files = output_files(a.path());
        ensure!(files.len() >= 8, "only {} output files", files.len());
        for f in &files {
            let name = f.file_name().unwrap();
            ensure!(read(f)? == read(&b.path().join(name))?, "{} differs between runs", name.to_string_lossy());
        }
        for archive in ["hmm.json", "lstm.json"] {
            let strip = |d: &Path| -> Result<String, String> {
                let mut m = cropcast_cli::ModelArchive::load(&d.join(archive), "compare").map_err(|e| e.to_string())?;
                m.created_unix = 0;
                m.to_json().map_err(|e| e.to_string())
            };
            ensure!(strip(a.path())? == strip(b.path())?, "{archive} differs beyond its timestamp");
        }
        Ok(format!("{} table/plot files and both archives identical across runs", files.len()))
    };
    verdict(8, "end-to-end determinism", Duration::from_secs(60), started, check());
}

// ------------------------------------------------------------------ 9

#[test]
fn criterion_9_forecast_contract() {
    let started = Instant::now();
    let check = || -> Check {
        let dir = TempDir::new().unwrap();
        let out = dir.path().to_str().unwrap();
        run_ok(&["--input", FIXTURE, "--out", out, "train-hmm"])?;
        let forecast_csv = dir.path().join("forecast.csv");
        run_ok(&["--out", out, "forecast", "--horizon", "4"])?;
        let first = read(&forecast_csv)?;
        let years: Vec<&str> = first.lines().skip(1).filter_map(|l| l.split(',').next()).collect();
        ensure!(years == ["2022", "2023", "2024", "2025"], "forecast years {years:?}");
        run_ok(&["--out", out, "forecast", "--horizon", "4", "--seed", "99"])?;
        ensure!(read(&forecast_csv)? == first, "argmax forecast changed between invocations");
        let diag = read(&dir.path().join("forecast_diagnostics.txt"))?;
        let line = diag
            .lines()
            .find(|l| l.contains("published narrative"))
            .ok_or_else(|| format!("divergence from the narrated path not logged:\n{diag}"))?;
        let rows: Vec<&str> = first.lines().skip(1).collect();
        Ok(format!("rows {}; logged \"{line}\"", rows.join(" ")))
    };
    verdict(9, "forecast contract", Duration::from_secs(10), started, check());
}
