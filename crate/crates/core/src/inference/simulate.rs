use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BruteForceDecoder, ChannelModel, DecodeMode, InferenceError, G2};
use crate::symplectic::GroupCode;

const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_halfwidth: f64,
}

/// One line of the line-delimited JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub epsilon: f64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_halfwidth: f64,
    pub decoder: String,
    pub seed: u64,
}

impl SimRecord {
    pub fn new(epsilon: f64, result: &SimResult, mode: DecodeMode, seed: u64) -> Self {
        SimRecord {
            epsilon,
            trials: result.trials,
            failures: result.failures,
            rate: result.rate,
            ci_halfwidth: result.ci_halfwidth,
            decoder: mode.name().to_string(),
            seed,
        }
    }
}

/// Half-width of the Wilson score interval at 95%.
pub fn wilson_halfwidth(failures: u64, trials: u64) -> f64 {
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n)
}

/// Trial `t` draws its error from `ChaCha8Rng::seed_from_u64(seed)` on
/// stream `t`, so the result does not depend on scheduling.
fn sample<T: Float>(ch: &ChannelModel<T>, seed: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let n = ch.n();
    let mut e = 0u64;
    for k in 0..n {
        let u: f64 = rng.gen();
        let t = ch.table(k);
        let mut acc = 0.0;
        let mut sym = 3;
        for (s, p) in t.iter().enumerate() {
            acc += p.to_f64().unwrap_or(0.0);
            if u < acc {
                sym = s;
                break;
            }
        }
        let (x, z) = (sym as u64 & 1, sym as u64 >> 1);
        e |= x << (2 * n - 1 - k) | z << (n - 1 - k);
    }
    e
}

/// Monte Carlo logical error rate. A trial fails when the decoded error
/// `ê` satisfies `ê + e ∉ C`.
pub fn simulate<T: Float + Send + Sync>(
    stab: &GroupCode<G2>,
    ch: &ChannelModel<T>,
    trials: u64,
    seed: u64,
    mode: DecodeMode,
    bound: usize,
) -> Result<SimResult, InferenceError> {
    if trials == 0 {
        return Err(InferenceError::NoTrials);
    }
    let dec = BruteForceDecoder::new(stab, ch.clone(), mode, bound)?;
    let table = dec.lookup_table();
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let e = sample(ch, seed, t);
            let ehat = table[dec.syndrome_bits(e) as usize];
            u64::from(!dec.same_coset(e, ehat))
        })
        .sum();
    Ok(SimResult {
        trials,
        failures,
        rate: failures as f64 / trials as f64,
        ci_halfwidth: wilson_halfwidth(failures, trials),
    })
}
