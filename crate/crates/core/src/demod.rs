//! Symbol-wise (SD), exact bit-wise (BD) and max-log bit-wise (ABD)
//! demodulation of a single real observation.

use crate::constellation::{BitPattern, Constellation, Labeling};
use crate::error::{Error, Result};

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// AWGN channel parameters for a unit-energy constellation.
///
/// `snr` is the linear `E_s/N_0`; with unit symbol energy `N_0 = 1/snr`
/// and the noise variance per real dimension is `N_0/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    snr: f64,
}

impl ChannelParams {
    pub fn new(snr: f64) -> Result<Self> {
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(Error::InvalidSnr(snr));
        }
        Ok(Self { snr })
    }

    pub fn from_db(snr_db: f64) -> Result<Self> {
        Self::new(db_to_linear(snr_db))
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn snr_db(&self) -> f64 {
        linear_to_db(self.snr)
    }

    pub fn n0(&self) -> f64 {
        1.0 / self.snr
    }

    pub fn noise_variance(&self) -> f64 {
        0.5 / self.snr
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_variance().sqrt()
    }
}

/// One L-value per bit position.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector {
    pub values: Vec<f64>,
}

impl LlrVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Index of the point nearest to `y`; ties go to the lower index.
pub fn nearest_point(y: f64, constellation: &Constellation) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, &s) in constellation.points().iter().enumerate() {
        let dist = (y - s) * (y - s);
        if dist < best_dist {
            best = i;
            best_dist = dist;
        }
    }
    best
}

/// Label of the nearest constellation point.
pub fn sd_decide(y: f64, labeling: &Labeling, constellation: &Constellation) -> Vec<u8> {
    labeling.row_bits(nearest_point(y, constellation))
}

fn log_sum_exp(exponents: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = exponents.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + exponents.map(|e| (e - max).exp()).sum::<f64>().ln()
}

fn subset_exponents<'a>(
    y: f64,
    snr: f64,
    pattern: &'a BitPattern,
    constellation: &'a Constellation,
    u: u8,
) -> impl Iterator<Item = f64> + Clone + 'a {
    constellation
        .points()
        .iter()
        .enumerate()
        .filter(move |&(i, _)| pattern.bit(i) == u)
        .map(move |(_, &s)| -snr * (y - s) * (y - s))
}

/// Exact L-value of a single bit whose pattern is `pattern`.
pub fn exact_llr_bit(
    y: f64,
    pattern: &BitPattern,
    constellation: &Constellation,
    params: ChannelParams,
) -> f64 {
    let snr = params.snr();
    log_sum_exp(subset_exponents(y, snr, pattern, constellation, 1))
        - log_sum_exp(subset_exponents(y, snr, pattern, constellation, 0))
}

/// Max-log L-value of a single bit whose pattern is `pattern`.
pub fn maxlog_llr_bit(
    y: f64,
    pattern: &BitPattern,
    constellation: &Constellation,
    params: ChannelParams,
) -> f64 {
    let mut min = [f64::INFINITY; 2];
    for (i, &s) in constellation.points().iter().enumerate() {
        let u = pattern.bit(i) as usize;
        min[u] = min[u].min((y - s) * (y - s));
    }
    params.snr() * (min[0] - min[1])
}

/// Exact a-posteriori L-values, numerator for bit value 1.
pub fn exact_llr(
    y: f64,
    labeling: &Labeling,
    constellation: &Constellation,
    params: ChannelParams,
) -> LlrVector {
    LlrVector {
        values: labeling
            .columns()
            .iter()
            .map(|p| exact_llr_bit(y, p, constellation, params))
            .collect(),
    }
}

/// Max-log L-values.
pub fn maxlog_llr(
    y: f64,
    labeling: &Labeling,
    constellation: &Constellation,
    params: ChannelParams,
) -> LlrVector {
    LlrVector {
        values: labeling
            .columns()
            .iter()
            .map(|p| maxlog_llr_bit(y, p, constellation, params))
            .collect(),
    }
}

/// Sign decision, `b = 1` iff `l >= 0`.
#[inline]
pub fn decide_bit(llr: f64) -> u8 {
    u8::from(llr >= 0.0)
}

pub fn abd_decide(llr: &LlrVector) -> Vec<u8> {
    llr.values.iter().map(|&l| decide_bit(l)).collect()
}
