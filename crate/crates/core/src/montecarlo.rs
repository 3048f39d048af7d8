//! Seeded AWGN simulation of the SD, BD and ABD demodulators.
//!
//! Randomness comes from ChaCha8 with one stream per `(SNR index, chunk)`
//! pair, so results do not depend on the thread count. Symbols are drawn
//! uniformly; noise samples use the ziggurat `StandardNormal` sampler scaled
//! by `sqrt(N_0 / 2)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytic_ber::BerPoint;
use crate::constellation::{BitPattern, Constellation, Labeling};
use crate::demod::{decide_bit, exact_llr_bit, maxlog_llr_bit, nearest_point, ChannelParams};
use crate::error::{Error, Result};

/// Fewest symbols accepted for a reported estimate.
pub const MIN_TRIALS: u64 = 10_000;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Demodulator {
    Sd,
    Bd,
    Abd,
}

impl Demodulator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Sd => "sd",
            Self::Bd => "bd",
            Self::Abd => "abd",
        }
    }
}

impl fmt::Display for Demodulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Demodulator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sd" => Ok(Self::Sd),
            "bd" => Ok(Self::Bd),
            "abd" => Ok(Self::Abd),
            _ => Err(Error::InvalidArgument(format!("unknown demodulator `{s}`"))),
        }
    }
}

/// What is transmitted: a whole labeling, or a single bit with one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimTarget {
    Pattern(BitPattern),
    Labeling(Labeling),
}

impl SimTarget {
    fn columns(&self) -> Vec<BitPattern> {
        match self {
            Self::Pattern(p) => vec![*p],
            Self::Labeling(l) => l.columns().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub snr_db_grid: Vec<f64>,
    pub demodulator: Demodulator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerEstimate {
    pub point: BerPoint,
    pub stderr: f64,
    pub bit_errors: u64,
    pub bits_sent: u64,
    /// Errors per bit position; each position carries `trials` bits.
    pub per_position_errors: Vec<u64>,
}

impl BerEstimate {
    fn new(snr_db: f64, per_position_errors: Vec<u64>, trials: u64) -> Self {
        let bit_errors: u64 = per_position_errors.iter().sum();
        let bits_sent = trials * per_position_errors.len() as u64;
        let p = bit_errors as f64 / bits_sent as f64;
        Self {
            point: BerPoint { snr_db, value: p },
            stderr: (p * (1.0 - p) / bits_sent as f64).sqrt(),
            bit_errors,
            bits_sent,
            per_position_errors,
        }
    }

    /// Normal-approximation interval `value +- z * stderr`, clamped to `[0, 1]`.
    pub fn confidence_interval(&self, z: f64) -> (f64, f64) {
        let v = self.point.value;
        (
            (v - z * self.stderr).max(0.0),
            (v + z * self.stderr).min(1.0),
        )
    }
}

fn chunk_rng(seed: u64, snr_index: usize, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 32) | chunk);
    rng
}

/// Runs `body(symbol, y)` for every trial of one SNR point, in parallel
/// chunks, and sums the per-chunk counters.
fn run_trials<F>(
    constellation: &Constellation,
    params: ChannelParams,
    trials: u64,
    seed: u64,
    snr_index: usize,
    counters: usize,
    body: F,
) -> Vec<u64>
where
    F: Fn(usize, f64, &mut [u64]) + Sync,
{
    let size = constellation.size();
    let sigma = params.noise_std();
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, snr_index, chunk);
            let mut acc = vec![0u64; counters];
            let n = CHUNK.min(trials - chunk * CHUNK);
            for _ in 0..n {
                let i = rng.random_range(0..size);
                let noise: f64 = rng.sample(StandardNormal);
                body(i, constellation.points()[i] + sigma * noise, &mut acc);
            }
            acc
        })
        .reduce(
            || vec![0u64; counters],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn check_config(
    target: &SimTarget,
    constellation: &Constellation,
    config: &SimConfig,
) -> Result<Vec<BitPattern>> {
    if config.trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_TRIALS} trials are required, got {}",
            config.trials
        )));
    }
    let columns = target.columns();
    if columns[0].size() != constellation.size() {
        return Err(Error::LengthMismatch {
            expected: constellation.size(),
            actual: columns[0].size(),
        });
    }
    Ok(columns)
}

/// Monte-Carlo BER of `target` on `constellation` at every SNR in the grid.
pub fn simulate(
    target: &SimTarget,
    constellation: &Constellation,
    config: &SimConfig,
) -> Result<Vec<BerEstimate>> {
    let columns = check_config(target, constellation, config)?;
    let m = columns.len();
    config
        .snr_db_grid
        .iter()
        .enumerate()
        .map(|(snr_index, &snr_db)| {
            let params = ChannelParams::from_db(snr_db)?;
            let errors = run_trials(
                constellation,
                params,
                config.trials,
                config.seed,
                snr_index,
                m,
                |i, y, acc| match config.demodulator {
                    Demodulator::Sd => {
                        let k = nearest_point(y, constellation);
                        for (j, c) in columns.iter().enumerate() {
                            acc[j] += u64::from(c.bit(k) != c.bit(i));
                        }
                    }
                    Demodulator::Abd => {
                        for (j, c) in columns.iter().enumerate() {
                            let b = decide_bit(maxlog_llr_bit(y, c, constellation, params));
                            acc[j] += u64::from(b != c.bit(i));
                        }
                    }
                    Demodulator::Bd => {
                        for (j, c) in columns.iter().enumerate() {
                            let b = decide_bit(exact_llr_bit(y, c, constellation, params));
                            acc[j] += u64::from(b != c.bit(i));
                        }
                    }
                },
            );
            Ok(BerEstimate::new(snr_db, errors, config.trials))
        })
        .collect()
}

/// SD/ABD agreement on shared noise realizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecisionComparison {
    pub samples: u64,
    /// Bits where SD and ABD disagree, excluding exact-tie observations.
    pub discrepancies: u64,
    /// Observations equidistant (in floating point) from two points.
    pub ties: u64,
}

/// Compares SD and ABD bit decisions for the same observations.
pub fn compare_sd_abd(
    labeling: &Labeling,
    constellation: &Constellation,
    snr_db: f64,
    trials: u64,
    seed: u64,
) -> Result<DecisionComparison> {
    let params = ChannelParams::from_db(snr_db)?;
    let counts = run_trials(constellation, params, trials, seed, 0, 2, |_, y, acc| {
        let k = nearest_point(y, constellation);
        let best = (y - constellation.points()[k]).powi(2);
        let tie = constellation
            .points()
            .iter()
            .enumerate()
            .any(|(i, &s)| i != k && (y - s).powi(2) == best);
        if tie {
            acc[1] += 1;
            return;
        }
        for c in labeling.columns() {
            let abd = decide_bit(maxlog_llr_bit(y, c, constellation, params));
            acc[0] += u64::from(abd != c.bit(k));
        }
    });
    Ok(DecisionComparison {
        samples: trials,
        discrepancies: counts[0],
        ties: counts[1],
    })
}
