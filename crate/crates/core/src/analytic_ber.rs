//! Closed-form pattern and labeling BER.
//!
//! The general threshold form works for any one-dimensional constellation
//! and any thresholds (midpoints for the ABD, L-value zero crossings for the
//! BD). For equally spaced PAM with midpoint thresholds the BER collapses to
//! an integer-weighted sum of Q-functions, `P = (1/M) sum_n a_n Q((2n-1) d sqrt(2 snr))`.

use std::cmp::Ordering;
use std::f64::consts::SQRT_2;

use crate::constellation::{pam_half_spacing, BitPattern, Constellation, Labeling};
use crate::demod::ChannelParams;
use crate::error::{Error, Result};
use crate::thresholds::{bd_thresholds, midpoint_thresholds, relevance_mask, ThresholdSet};

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`, via `erfc`.
pub fn qfunc(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Which coefficient vector a [`CoefficientVector`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientKind {
    /// `a` of a single pattern.
    PatternA,
    /// `alpha`, the sum of `a` over a labeling's patterns.
    LabelingAlpha,
}

/// Integer weights of `Q((2n-1) d sqrt(2 snr))`, `n = 1..M-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoefficientVector {
    pub entries: Vec<i64>,
    pub kind: CoefficientKind,
}

impl CoefficientVector {
    /// Constellation size `M` implied by the vector length.
    pub fn size(&self) -> usize {
        self.entries.len() + 1
    }

    /// Exact equally-spaced PAM BER defined by these coefficients.
    pub fn ber(&self, params: ChannelParams) -> f64 {
        let size = self.size();
        let scale = match self.kind {
            CoefficientKind::PatternA => size as f64,
            CoefficientKind::LabelingAlpha => (size.trailing_zeros() as usize * size) as f64,
        };
        let step = pam_half_spacing(size) * (2.0 * params.snr()).sqrt();
        self.entries
            .iter()
            .enumerate()
            .map(|(n, &a)| a as f64 * qfunc((2 * n + 1) as f64 * step))
            .sum::<f64>()
            / scale
    }

    /// High-SNR order: lexicographic on `(a_1, a_2, ...)`.
    pub fn high_snr_cmp(&self, other: &Self) -> Ordering {
        self.entries.cmp(&other.entries)
    }
}

/// BER value at an SNR given in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub value: f64,
}

fn check_sizes(
    pattern: &BitPattern,
    constellation: &Constellation,
    thresholds: &ThresholdSet,
) -> Result<()> {
    let size = constellation.size();
    if pattern.size() != size {
        return Err(Error::LengthMismatch {
            expected: size,
            actual: pattern.size(),
        });
    }
    if thresholds.len() != size - 1 {
        return Err(Error::LengthMismatch {
            expected: size - 1,
            actual: thresholds.len(),
        });
    }
    Ok(())
}

/// Conditional interval probabilities `v[i][k] = P(beta_{k-1} < Y <= beta_k | X = s_i)`
/// with `beta_0 = -inf` and `beta_M = +inf`.
pub fn interval_probs(
    constellation: &Constellation,
    thresholds: &ThresholdSet,
    params: ChannelParams,
) -> Vec<Vec<f64>> {
    let scale = (2.0 * params.snr()).sqrt();
    let size = constellation.size();
    constellation
        .points()
        .iter()
        .map(|&s| {
            let tail: Vec<f64> = thresholds
                .betas
                .iter()
                .map(|&b| qfunc((b - s) * scale))
                .collect();
            (0..size)
                .map(|k| {
                    if k == 0 {
                        qfunc((s - thresholds.betas[0]) * scale)
                    } else if k == size - 1 {
                        tail[k - 1]
                    } else {
                        tail[k - 1] - tail[k]
                    }
                })
                .collect()
        })
        .collect()
}

/// Pattern BER for arbitrary thresholds:
/// `P = 1/2 + (1/M) sum_i sum_k g_{i,k} Q((beta_k - s_i) sqrt(2 snr))`.
///
/// Terms with negative argument are folded through `Q(x) = 1 - Q(-x)` so the
/// integer part cancels exactly and small BERs keep full relative precision.
pub fn pber_general(
    pattern: &BitPattern,
    constellation: &Constellation,
    thresholds: &ThresholdSet,
    params: ChannelParams,
) -> Result<f64> {
    check_sizes(pattern, constellation, thresholds)?;
    let size = constellation.size();
    let scale = (2.0 * params.snr()).sqrt();
    let g = relevance_mask(pattern);
    let mut constant = (size / 2) as i64;
    let mut tails = 0.0;
    for (i, &s) in constellation.points().iter().enumerate() {
        for (k, &beta) in thresholds.betas.iter().enumerate() {
            let gik = g.get(i, k);
            if gik == 0 {
                continue;
            }
            let arg = (beta - s) * scale;
            if arg >= 0.0 {
                tails += f64::from(gik) * qfunc(arg);
            } else {
                constant += i64::from(gik);
                tails -= f64::from(gik) * qfunc(-arg);
            }
        }
    }
    Ok((constant as f64 + tails) / size as f64)
}

/// Same quantity as [`pber_general`] through `(1/M) sum_i sum_k e_{i,k} v_{i,k}`
/// with `e_{i,k} = p_i xor p_k`.
pub fn pber_interval_form(
    pattern: &BitPattern,
    constellation: &Constellation,
    thresholds: &ThresholdSet,
    params: ChannelParams,
) -> Result<f64> {
    check_sizes(pattern, constellation, thresholds)?;
    let size = constellation.size();
    let v = interval_probs(constellation, thresholds, params);
    let mut total = 0.0;
    for (i, row) in v.iter().enumerate() {
        for (k, &vik) in row.iter().enumerate() {
            if pattern.bit(i) != pattern.bit(k) {
                total += vik;
            }
        }
    }
    Ok(total / size as f64)
}

/// `a_n = sum_{k=n}^{M-1} (p_{k+1} - p_k)(1 - 2 p_{k+1-n}) - (p_{k+2-n} - p_{k+1-n})(1 - 2 p_{k+1})`.
pub fn pattern_coefficients(pattern: &BitPattern) -> CoefficientVector {
    let size = pattern.size();
    // one-based accessor
    let p = |i: usize| i64::from(pattern.bit(i - 1));
    let entries = (1..size)
        .map(|n| {
            (n..size)
                .map(|k| {
                    (p(k + 1) - p(k)) * (1 - 2 * p(k + 1 - n))
                        - (p(k + 2 - n) - p(k + 1 - n)) * (1 - 2 * p(k + 1))
                })
                .sum()
        })
        .collect();
    CoefficientVector {
        entries,
        kind: CoefficientKind::PatternA,
    }
}

/// Pattern BER for equally spaced unit-energy PAM with midpoint thresholds.
pub fn pber_pam(pattern: &BitPattern, params: ChannelParams) -> f64 {
    pattern_coefficients(pattern).ber(params)
}

/// `alpha = sum_j a(column_j)`.
pub fn labeling_coefficients(labeling: &Labeling) -> CoefficientVector {
    let mut entries = vec![0i64; labeling.size() - 1];
    for column in labeling.columns() {
        for (acc, a) in entries.iter_mut().zip(pattern_coefficients(column).entries) {
            *acc += a;
        }
    }
    CoefficientVector {
        entries,
        kind: CoefficientKind::LabelingAlpha,
    }
}

/// `A_phi = 2 m (M - 1) - alpha_1`.
pub fn a_phi(alpha: &CoefficientVector) -> i64 {
    let size = alpha.size();
    2 * i64::from(size.trailing_zeros()) * (size as i64 - 1) - alpha.entries[0]
}

/// Bit-wise demodulator used for labeling BER.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemodKind {
    /// Max-log decisions, midpoint thresholds (identical to symbol decisions).
    AbdMidpoints,
    /// Exact L-value decisions, thresholds solved numerically at the SNR.
    BdNumeric,
}

/// Pattern BER under the chosen demodulator.
pub fn pattern_ber(
    pattern: &BitPattern,
    constellation: &Constellation,
    params: ChannelParams,
    demod: DemodKind,
) -> Result<f64> {
    let thresholds = match demod {
        DemodKind::AbdMidpoints => midpoint_thresholds(constellation),
        DemodKind::BdNumeric => bd_thresholds(pattern, constellation, params)?,
    };
    let p = pber_general(pattern, constellation, &thresholds, params)?;
    debug_assert!(
        {
            let q = pber_interval_form(pattern, constellation, &thresholds, params)?;
            (p - q).abs() <= 1e-10
        },
        "threshold and interval forms disagree"
    );
    Ok(p)
}

/// Labeling BER, the mean of the per-column pattern BERs.
pub fn labeling_ber(
    labeling: &Labeling,
    constellation: &Constellation,
    params: ChannelParams,
    demod: DemodKind,
) -> Result<f64> {
    let mut total = 0.0;
    for column in labeling.columns() {
        total += pattern_ber(column, constellation, params, demod)?;
    }
    Ok(total / labeling.bits_per_symbol() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{all_patterns, make_pam, named_labeling, LabelingName};

    fn pat(size: usize, w: u64) -> BitPattern {
        BitPattern::from_index(size, w).unwrap()
    }

    fn snr(x: f64) -> ChannelParams {
        ChannelParams::new(x).unwrap()
    }

    /// Composite Simpson on the standard normal density, `[x, x + 40]`.
    fn q_by_simpson(x: f64) -> f64 {
        let n = 400_000;
        let h = 40.0 / n as f64;
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = pdf(x) + pdf(x + 40.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * pdf(x + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn qfunc_values() {
        assert_eq!(qfunc(0.0), 0.5);
        for x in [0.5, 1.0, 3.0] {
            assert!((qfunc(x) + qfunc(-x) - 1.0).abs() < 1e-15);
        }
        // frozen from the Simpson oracle (checked below as well)
        assert!((qfunc(1.0) - 0.158655253931457).abs() < 1e-14);
        for x in [0.3, 1.0, 2.5, 5.0, 8.0] {
            let oracle = q_by_simpson(x);
            assert!(((qfunc(x) - oracle) / oracle).abs() < 1e-10, "x={x}");
        }
        assert!(qfunc(40.0) < 1e-300);
        assert!(qfunc(40.0) >= 0.0);
    }

    #[test]
    fn interval_rows_are_stochastic() {
        let c = make_pam(8).unwrap();
        let t = midpoint_thresholds(&c);
        for g in [0.01, 1.0, 100.0] {
            for row in interval_probs(&c, &t, snr(g)) {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(row.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
        }
    }

    #[test]
    fn bpsk_formula() {
        let c = make_pam(2).unwrap();
        let p = pat(2, 1);
        let t = midpoint_thresholds(&c);
        for g in [0.1, 1.0, 10.0] {
            let want = qfunc((2.0f64 * g).sqrt());
            assert!((pber_general(&p, &c, &t, snr(g)).unwrap() - want).abs() < 1e-15);
            assert!((pber_pam(&p, snr(g)) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_snr_limit() {
        let c4 = make_pam(4).unwrap();
        let t = midpoint_thresholds(&c4);
        for w in [3, 5, 6] {
            let p = pat(4, w);
            let v = pber_general(&p, &c4, &t, snr(1e-12)).unwrap();
            assert!((v - 0.5).abs() < 1e-5, "w={w}: {v}");
            assert!((pber_pam(&p, snr(1e-12)) - 0.5).abs() < 1e-5);
        }
        let sum: i64 = pattern_coefficients(&pat(4, 5)).entries.iter().sum();
        assert_eq!(sum, 4);
    }

    #[test]
    fn table_coefficients() {
        assert_eq!(pattern_coefficients(&pat(4, 3)).entries, vec![2, 2, 0]);
        assert_eq!(pattern_coefficients(&pat(4, 5)).entries, vec![6, -4, 2]);
        assert_eq!(pattern_coefficients(&pat(4, 6)).entries, vec![4, 2, -2]);
        assert_eq!(
            pattern_coefficients(&pat(8, 85)).entries,
            vec![14, -12, 10, -8, 6, -4, 2]
        );
    }

    #[test]
    fn p3_closed_form() {
        let d = pam_half_spacing(4);
        for g in [0.5, 2.0, 20.0] {
            let k = (2.0f64 * g).sqrt() * d;
            let want = 0.25 * (2.0 * qfunc(k) + 2.0 * qfunc(3.0 * k));
            assert!((pber_pam(&pat(4, 3), snr(g)) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn both_forms_agree_exhaustive() {
        for size in [4, 8] {
            let c = make_pam(size).unwrap();
            let t = midpoint_thresholds(&c);
            for p in all_patterns(size).unwrap() {
                for g in [0.1, 1.0, 10.0, 100.0] {
                    let a = pber_general(&p, &c, &t, snr(g)).unwrap();
                    let b = pber_interval_form(&p, &c, &t, snr(g)).unwrap();
                    let e = pber_pam(&p, snr(g));
                    assert!((a - b).abs() < 1e-12, "{p} {g}");
                    assert!((a - e).abs() < 1e-12, "{p} {g}");
                }
            }
        }
    }

    #[test]
    fn remark_a1_is_twice_adjacent_disagreements() {
        for size in [4, 8, 16] {
            for p in all_patterns(size).unwrap() {
                let changes = (0..size - 1).filter(|&k| p.bit(k) != p.bit(k + 1)).count();
                let a = pattern_coefficients(&p);
                assert_eq!(a.entries[0], 2 * changes as i64);
                assert!(a.entries[0] % 2 == 0 && a.entries[0] >= 2);
                assert!(a.entries[0] <= 2 * (size as i64 - 1));
            }
        }
    }

    #[test]
    fn coefficients_invariant_under_reflection_and_inversion() {
        for size in [4, 8, 16] {
            for p in all_patterns(size).unwrap() {
                let a = pattern_coefficients(&p);
                assert_eq!(a, pattern_coefficients(&p.invert()));
                assert_eq!(a, pattern_coefficients(&p.reflect()));
            }
        }
    }

    #[test]
    fn pam_ber_decreasing() {
        for p in all_patterns(8).unwrap() {
            let mut prev = f64::INFINITY;
            for i in 0..=200 {
                let g = 10f64.powf(i as f64 / 50.0);
                let v = pber_pam(&p, snr(g));
                assert!(v < prev, "{p} at snr {g}");
                prev = v;
            }
        }
    }

    #[test]
    fn labeling_alpha_and_ber() {
        let brgc4 = named_labeling(LabelingName::Brgc, 4).unwrap();
        let alpha = labeling_coefficients(&brgc4);
        assert_eq!(alpha.entries, vec![6, 4, -2]);
        let c4 = make_pam(4).unwrap();
        let d = pam_half_spacing(4);
        for g in [0.3, 3.0, 30.0] {
            let k = (2.0f64 * g).sqrt() * d;
            let want = (6.0 * qfunc(k) + 4.0 * qfunc(3.0 * k) - 2.0 * qfunc(5.0 * k)) / 8.0;
            let got = labeling_ber(&brgc4, &c4, snr(g), DemodKind::AbdMidpoints).unwrap();
            assert!((got - want).abs() < 1e-15);
            assert!((alpha.ber(snr(g)) - want).abs() < 1e-15);
        }

        let nbc8 = named_labeling(LabelingName::Nbc, 8).unwrap();
        assert_eq!(
            labeling_coefficients(&nbc8).entries,
            vec![22, -4, 8, -10, 8, -2, 2]
        );
        let ag8 = named_labeling(LabelingName::Ag, 8).unwrap();
        assert_eq!(
            labeling_coefficients(&ag8).entries,
            vec![36, -18, 6, 4, -4, -2, 2]
        );
        let brgc8 = named_labeling(LabelingName::Brgc, 8).unwrap();
        assert_eq!(a_phi(&labeling_coefficients(&brgc8)), 28);
    }

    #[test]
    fn bd_and_abd_close_above_zero_db() {
        let c = make_pam(8).unwrap();
        let brgc = named_labeling(LabelingName::Brgc, 8).unwrap();
        for i in 0..=20 {
            let params = ChannelParams::from_db(i as f64).unwrap();
            let abd = labeling_ber(&brgc, &c, params, DemodKind::AbdMidpoints).unwrap();
            let bd = labeling_ber(&brgc, &c, params, DemodKind::BdNumeric).unwrap();
            assert!(bd <= abd * (1.0 + 1e-12));
            assert!((abd - bd) / abd <= 0.02, "{i} dB");
        }
    }

    #[test]
    fn size_mismatch() {
        let c = make_pam(8).unwrap();
        let t = midpoint_thresholds(&c);
        assert!(pber_general(&pat(4, 3), &c, &t, snr(1.0)).is_err());
    }
}
