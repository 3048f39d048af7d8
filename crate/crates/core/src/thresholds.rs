//! Decision thresholds on the observation axis.
//!
//! ABD thresholds are the midpoints between adjacent points. BD thresholds
//! are zero crossings of the exact L-value and move with the SNR.

use crate::constellation::{BitPattern, Constellation};
use crate::demod::{exact_llr_bit, ChannelParams};
use crate::error::{Error, Result};

/// Samples per gap between adjacent points when scanning for sign changes.
pub const SCAN_SAMPLES: usize = 1024;

/// Thresholds `beta_1 < ... < beta_{M-1}`; entry `k` separates points `k`
/// and `k + 1` (zero-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet {
    pub betas: Vec<f64>,
    /// `None` when the set is not tied to a pattern.
    pub relevant: Option<Vec<bool>>,
    /// Thresholds for which several crossings were found; the one nearest
    /// the midpoint was kept.
    pub multi_root: Vec<usize>,
}

impl ThresholdSet {
    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn is_relevant(&self, k: usize) -> bool {
        self.relevant.as_ref().is_none_or(|r| r[k])
    }

    /// Marks entries where the pattern changes value as relevant.
    pub fn with_relevance(mut self, pattern: &BitPattern) -> Self {
        self.relevant = Some(relevant_transitions(pattern));
        self
    }
}

/// `(s_k + s_{k+1}) / 2` for every adjacent pair.
pub fn midpoint_thresholds(constellation: &Constellation) -> ThresholdSet {
    ThresholdSet {
        betas: constellation
            .points()
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect(),
        relevant: None,
        multi_root: Vec::new(),
    }
}

fn relevant_transitions(pattern: &BitPattern) -> Vec<bool> {
    (0..pattern.size() - 1)
        .map(|k| pattern.bit(k) != pattern.bit(k + 1))
        .collect()
}

/// `g_{i,k} = (p_{k+1} - p_k)(1 - 2 p_i)`, an `M x (M-1)` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceMask {
    size: usize,
    g: Vec<i8>,
}

impl RelevanceMask {
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> i8 {
        self.g[i * (self.size - 1) + k]
    }

    pub fn column(&self, k: usize) -> Vec<i8> {
        (0..self.size).map(|i| self.get(i, k)).collect()
    }
}

pub fn relevance_mask(pattern: &BitPattern) -> RelevanceMask {
    let size = pattern.size();
    let p = |i: usize| i8::from(pattern.bit(i) as i8 == 1);
    let mut g = Vec::with_capacity(size * (size - 1));
    for i in 0..size {
        for k in 0..size - 1 {
            g.push((p(k + 1) - p(k)) * (1 - 2 * p(i)));
        }
    }
    RelevanceMask { size, g }
}

/// Bisection on a bracket with a sign change, carried down to adjacent
/// doubles (well below `1e-10` for any bracket this module uses).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Crossing {
    y: f64,
    /// Bit value decided to the right of the crossing.
    to_bit: u8,
}

/// Every sign change of `f` over the sorted sample grid, refined by
/// bisection. Samples where `f` is exactly zero count as a crossing only
/// when the sign differs on both sides.
fn sign_changes<F: Fn(f64) -> f64>(f: &F, grid: &[f64]) -> Vec<Crossing> {
    let mut out = Vec::new();
    let mut last: Option<(f64, bool)> = None;
    let mut zero_at: Option<f64> = None;
    for &y in grid {
        let v = f(y);
        if v == 0.0 {
            zero_at.get_or_insert(y);
            continue;
        }
        let positive = v > 0.0;
        if let Some((y_prev, prev_positive)) = last {
            if prev_positive != positive {
                let root = zero_at.unwrap_or_else(|| bisect(f, y_prev, y));
                out.push(Crossing {
                    y: root,
                    to_bit: u8::from(positive),
                });
            }
        }
        last = Some((y, positive));
        zero_at = None;
    }
    out
}

fn scan_grid(points: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let span = points[points.len() - 1] - points[0];
    let reach = 8.0 * span;
    let outer = 4 * SCAN_SAMPLES;
    let mut grid = Vec::with_capacity(2 * outer + points.len() * (SCAN_SAMPLES + 1));
    grid.extend((0..outer).map(|t| lo - reach + reach * t as f64 / outer as f64));
    for w in points.windows(2) {
        grid.extend(
            (0..=SCAN_SAMPLES).map(|t| w[0] + (w[1] - w[0]) * t as f64 / (SCAN_SAMPLES + 1) as f64),
        );
    }
    grid.push(hi);
    grid.extend((1..=outer).map(|t| hi + reach * t as f64 / outer as f64));
    grid
}

/// BD thresholds: zero crossings of the exact single-bit L-value.
///
/// Crossings are located over the whole observation axis (including beyond
/// the outer points, where an outer threshold sits at low SNR). When their
/// number and directions line up with the pattern's transitions they are
/// assigned in order. Otherwise each relevant threshold is searched in its
/// own bracket `(s_k, s_{k+1})`; several crossings there keep the one nearest
/// the midpoint and record `k` in `multi_root`, none gives
/// [`Error::NoSignChange`]. Irrelevant entries carry the midpoint.
pub fn bd_thresholds(
    pattern: &BitPattern,
    constellation: &Constellation,
    params: ChannelParams,
) -> Result<ThresholdSet> {
    let size = constellation.size();
    if pattern.size() != size {
        return Err(Error::LengthMismatch {
            expected: size,
            actual: pattern.size(),
        });
    }
    let points = constellation.points();
    let mut set = midpoint_thresholds(constellation).with_relevance(pattern);
    let relevant_ks: Vec<usize> = (0..size - 1).filter(|&k| set.is_relevant(k)).collect();

    let llr = |y: f64| exact_llr_bit(y, pattern, constellation, params);
    let grid = scan_grid(points, points[0], points[size - 1]);
    let crossings = sign_changes(&llr, &grid);

    let in_order = crossings.len() == relevant_ks.len()
        && crossings
            .iter()
            .zip(&relevant_ks)
            .all(|(c, &k)| c.to_bit == pattern.bit(k + 1));
    if in_order {
        for (c, &k) in crossings.iter().zip(&relevant_ks) {
            set.betas[k] = c.y;
        }
        return Ok(set);
    }

    for &k in &relevant_ks {
        let (lo, hi) = (points[k], points[k + 1]);
        let mid = 0.5 * (lo + hi);
        let mut candidates = crossings
            .iter()
            .filter(|c| c.y > lo && c.y < hi && c.to_bit == pattern.bit(k + 1));
        let Some(first) = candidates.next() else {
            return Err(Error::NoSignChange {
                k,
                snr: params.snr(),
            });
        };
        let mut best = first.y;
        for c in candidates {
            set.multi_root.push(k);
            if (c.y - mid).abs() < (best - mid).abs() {
                best = c.y;
            }
        }
        set.betas[k] = best;
    }
    set.multi_root.dedup();
    Ok(set)
}
