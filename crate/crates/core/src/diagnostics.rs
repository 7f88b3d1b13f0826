//! Side-by-side comparisons between computed results and the published
//! reference values. Every function returns human-readable lines; an empty
//! list means full agreement.

use crate::estimation::CountEstimates;
use crate::hmm::{HmmParams, LabelSet, ViterbiPath};
use crate::reference;

fn fmt_row(row: &[f64]) -> String {
    let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
    format!("[{}]", cells.join(", "))
}

/// Entry-by-entry comparison of two matrices with absolute tolerance `tol`.
pub fn compare_matrix(name: &str, computed: &[Vec<f64>], published: &[Vec<f64>], tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    if computed.len() != published.len() {
        out.push(format!("{name}: {} rows computed vs {} published", computed.len(), published.len()));
        return out;
    }
    for (i, (c, p)) in computed.iter().zip(published).enumerate() {
        let differs = c.len() != p.len() || c.iter().zip(p).any(|(a, b)| (a - b).abs() > tol);
        if differs {
            out.push(format!("{name} row {}: computed {} vs published {}", i + 1, fmt_row(c), fmt_row(p)));
        }
    }
    for (i, p) in published.iter().enumerate() {
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-3 {
            out.push(format!("{name} row {}: published row sums to {sum:.4}, not a probability row", i + 1));
        }
    }
    out
}

/// Compares counted emission counts with the published count matrix and,
/// when they disagree, searches for a column relabelling that reconciles
/// them.
pub fn emission_count_diagnostics(counts: &CountEstimates, symbols: &LabelSet) -> Vec<String> {
    let published: Vec<Vec<u64>> = reference::EMISSION_COUNTS.iter().map(|r| r.to_vec()).collect();
    if counts.emission_counts == published {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, (c, p)) in counts.emission_counts.iter().zip(&published).enumerate() {
        if c != p {
            out.push(format!("emission counts row {}: counted {c:?} vs published {p:?}", i + 1));
        }
    }
    let m = symbols.len();
    if let Some(perm) = permutations(m).into_iter().find(|perm| {
        counts
            .emission_counts
            .iter()
            .zip(&published)
            .all(|(c, p)| p.len() == m && perm.iter().enumerate().all(|(col, &src)| c[src] == p[col]))
    }) {
        let order: Vec<&str> = perm.iter().map(|&k| symbols.label(k).unwrap_or("?")).collect();
        out.push(format!(
            "published emission counts match the counted ones when its columns are read as [{}] instead of [{}]",
            order.join(", "),
            symbols.labels().join(", ")
        ));
    } else {
        out.push("no column relabelling reconciles the published emission counts".into());
    }
    out
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Lines comparing a re-estimated model with the published trained model.
pub fn trained_model_diagnostics(params: &HmmParams) -> Vec<String> {
    let mut out =
        compare_matrix("trained A", params.transition(), &reference::to_rows(&reference::TRAINED_TRANSITION), 5e-5);
    out.extend(compare_matrix("trained B", params.emission(), &reference::to_rows(&reference::TRAINED_EMISSION), 5e-5));
    let pi_gap = params.initial().iter().zip(reference::TRAINED_INITIAL).any(|(a, b)| (a - b).abs() > 5e-5);
    if pi_gap {
        out.push(format!(
            "trained pi: computed {} vs published {}",
            fmt_row(params.initial()),
            fmt_row(&reference::TRAINED_INITIAL)
        ));
    }
    out
}

/// Lines comparing a decoded path with the published decode and agreement.
pub fn decode_diagnostics(decoded: &ViterbiPath, recorded: &[usize], agreement: f64) -> Vec<String> {
    let published: Vec<usize> = reference::DECODED_STATE_CODES.iter().map(|&c| usize::from(c) - 1).collect();
    let mut out = Vec::new();
    if published.len() != decoded.states.len() {
        out.push(format!(
            "published decode has {} entries for a {}-step series; positional comparison is not possible",
            published.len(),
            decoded.states.len()
        ));
    } else if published != decoded.states {
        out.push("decoded path differs from the published decode".into());
    }
    if (agreement - reference::MATCH_FRACTION).abs() > 5e-5 {
        out.push(format!(
            "agreement with recorded states {agreement:.4} vs published {:.4} over {} years",
            reference::MATCH_FRACTION,
            recorded.len()
        ));
    }
    out
}

pub fn steady_state_diagnostics(label: &str, computed: &[f64]) -> Vec<String> {
    let gap = computed.iter().zip(reference::STEADY_STATE).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if computed.len() == reference::STEADY_STATE.len() && gap <= 5e-5 {
        return Vec::new();
    }
    vec![format!(
        "{label} steady state {} vs published {} (max gap {gap:.4})",
        fmt_row(computed),
        fmt_row(&reference::STEADY_STATE)
    )]
}

/// Lines comparing a forecast path with the narrated published one.
pub fn forecast_diagnostics(
    start_state: usize,
    states: &[usize],
    observations: &[usize],
    symbols: &LabelSet,
) -> Vec<String> {
    let mut out = Vec::new();
    let pub_start = usize::from(reference::FORECAST_START_CODE) - 1;
    if start_state != pub_start {
        out.push(format!("forecast starts from state {} vs published start state {}", start_state + 1, pub_start + 1));
    }
    let pub_states: Vec<usize> = reference::FORECAST_STATE_CODES.iter().map(|&c| usize::from(c) - 1).collect();
    let n = states.len().min(pub_states.len());
    if states[..n] != pub_states[..n] {
        let ours: Vec<String> = states[..n].iter().map(|s| (s + 1).to_string()).collect();
        let theirs: Vec<String> = pub_states[..n].iter().map(|s| (s + 1).to_string()).collect();
        out.push(format!("forecast states [{}] vs published narrative [{}]", ours.join(", "), theirs.join(", ")));
    }
    let pub_obs: Vec<usize> = reference::FORECAST_OBSERVATIONS
        .iter()
        .map(|&c| reference::observation_index(c).expect("static symbol"))
        .collect();
    let n = observations.len().min(pub_obs.len());
    if observations[..n] != pub_obs[..n] {
        let ours: Vec<&str> = observations[..n].iter().map(|&k| symbols.label(k).unwrap_or("?")).collect();
        out.push(format!(
            "forecast observations [{}] vs published narrative [{}]",
            ours.join(", "),
            reference::FORECAST_OBSERVATIONS.iter().map(char::to_string).collect::<Vec<_>>().join(", ")
        ));
    }
    out
}
