use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::HmmParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForecastMode {
    /// Most probable next state, then most probable symbol; ties to lowest index.
    #[default]
    Argmax,
    /// Draws from the transition and emission rows with a seeded generator.
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastStep {
    /// Steps ahead of the starting point, starting at 1.
    pub step: usize,
    pub state: usize,
    pub observation: usize,
}

/// Walks the chain `horizon` steps forward from `last_state`.
pub fn forecast(
    params: &HmmParams,
    last_state: usize,
    horizon: usize,
    mode: ForecastMode,
    seed: u64,
) -> Result<Vec<ForecastStep>> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("forecast horizon must be at least 1".into()));
    }
    if last_state >= params.n_states() {
        return Err(Error::InvalidArgument(format!(
            "last state {last_state} out of range for {} states",
            params.n_states()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = last_state;
    let mut out = Vec::with_capacity(horizon);
    for step in 1..=horizon {
        state = pick(&params.transition()[state], mode, &mut rng)?;
        let observation = pick(&params.emission()[state], mode, &mut rng)?;
        out.push(ForecastStep { step, state, observation });
    }
    Ok(out)
}

fn pick(row: &[f64], mode: ForecastMode, rng: &mut ChaCha8Rng) -> Result<usize> {
    match mode {
        ForecastMode::Argmax => Ok(argmax_first(row)),
        ForecastMode::Sample => {
            let dist = WeightedIndex::new(row)
                .map_err(|e| Error::InvalidParams(format!("cannot sample from row {row:?}: {e}")))?;
            Ok(dist.sample(rng))
        }
    }
}

pub(crate) fn argmax_first(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}
