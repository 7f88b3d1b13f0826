//! Input builders shared by the benchmarks.

use cropcast_core::hmm::HmmParams;

/// A 4-state, 3-symbol model with every entry positive.
pub fn dense_model() -> HmmParams {
    HmmParams::new(
        vec![0.4, 0.3, 0.2, 0.1],
        vec![vec![0.6, 0.2, 0.1, 0.1], vec![0.1, 0.6, 0.2, 0.1], vec![0.1, 0.1, 0.6, 0.2], vec![0.2, 0.1, 0.1, 0.6]],
        vec![vec![0.7, 0.2, 0.1], vec![0.2, 0.6, 0.2], vec![0.1, 0.3, 0.6], vec![0.3, 0.3, 0.4]],
    )
    .expect("static model")
}

/// Deterministic pseudo-random symbol sequence over `n_symbols`.
pub fn symbol_sequence(len: usize, n_symbols: usize) -> Vec<usize> {
    let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
    (0..len)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x % n_symbols as u64) as usize
        })
        .collect()
}

/// `len` points of a unit sine with period 16, rescaled to `[0, 1]`.
pub fn sine_series(len: usize) -> Vec<f64> {
    (0..len).map(|i| 0.5 + 0.5 * (2.0 * std::f64::consts::PI * i as f64 / 16.0).sin()).collect()
}
