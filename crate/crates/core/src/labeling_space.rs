//! The space of labelings seen as unordered sets of `m` patterns.
//!
//! Labeling BER depends only on the set of columns, and for PAM only on the
//! integer vector `alpha`, so distinct BER curves are counted by distinct
//! `alpha` vectors.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic_ber::{labeling_coefficients, CoefficientVector};
use crate::constellation::{all_patterns, BitPattern, Labeling};
use crate::error::{Error, Result};

/// Largest size accepted by exhaustive labeling enumeration.
pub const MAX_EXHAUSTIVE_SIZE: usize = 8;

/// All labelings sharing one `alpha` vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelingClass {
    pub alpha: CoefficientVector,
    /// The pattern set with the smallest sorted indices in the class.
    pub witness: Labeling,
    /// Number of pattern sets with this `alpha`.
    pub population: usize,
}

fn check_exhaustive(size: usize) -> Result<usize> {
    if size < 2 || !size.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(size));
    }
    if size > MAX_EXHAUSTIVE_SIZE {
        return Err(Error::TooLarge {
            size,
            max: MAX_EXHAUSTIVE_SIZE,
            what: "exhaustive labeling enumeration",
        });
    }
    Ok(size.trailing_zeros() as usize)
}

/// Depth-first search over increasing pattern indices. A partial choice of
/// `t` columns survives only if every `t`-bit row prefix occurs exactly
/// `M / 2^t` times, which is necessary for the rows to end up distinct.
fn extend(
    patterns: &[BitPattern],
    start: usize,
    chosen: &mut Vec<BitPattern>,
    m: usize,
    out: &mut Vec<Labeling>,
) {
    if chosen.len() == m {
        if let Ok(l) = Labeling::from_columns(chosen.clone()) {
            out.push(l);
        }
        return;
    }
    let size = patterns[0].size();
    for idx in start..patterns.len() {
        chosen.push(patterns[idx]);
        if prefixes_balanced(chosen, size) {
            extend(patterns, idx + 1, chosen, m, out);
        }
        chosen.pop();
    }
}

fn prefixes_balanced(columns: &[BitPattern], size: usize) -> bool {
    let t = columns.len();
    let mut counts = vec![0usize; 1 << t];
    for i in 0..size {
        let prefix = columns
            .iter()
            .fold(0usize, |acc, c| (acc << 1) | c.bit(i) as usize);
        counts[prefix] += 1;
    }
    let want = size >> t;
    counts.iter().all(|&c| c == want)
}

/// Every valid labeling (pattern set with distinct rows), columns in
/// increasing index order. Exhaustive for `M <= 8`.
pub fn enumerate_labelings(size: usize) -> Result<Vec<Labeling>> {
    let m = check_exhaustive(size)?;
    let patterns = all_patterns(size)?;
    let parts: Vec<Vec<Labeling>> = (0..patterns.len())
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut chosen = vec![patterns[first]];
            if m == 1 {
                out.extend(Labeling::from_columns(chosen).ok());
            } else {
                extend(&patterns, first + 1, &mut chosen, m, &mut out);
            }
            out
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// Random labelings from uniformly shuffled label assignments, with columns
/// sorted by index. Not exhaustive; duplicates are possible.
pub fn sample_labelings(size: usize, count: usize, seed: u64) -> Result<Vec<Labeling>> {
    if size < 2 || !size.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(size));
    }
    if size > 64 {
        return Err(Error::TooLarge {
            size,
            max: 64,
            what: "labelings",
        });
    }
    let m = size.trailing_zeros() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u32> = (0..size as u32).collect();
    (0..count)
        .map(|_| {
            labels.shuffle(&mut rng);
            let l = Labeling::from_row_labels(m, &labels)?;
            let mut cols = l.columns().to_vec();
            cols.sort();
            Labeling::from_columns(cols)
        })
        .collect()
}

/// Groups labelings by `alpha`, best first at high SNR.
pub fn census<I: IntoIterator<Item = Labeling>>(labelings: I) -> Vec<LabelingClass> {
    let mut table: BTreeMap<Vec<i64>, LabelingClass> = BTreeMap::new();
    for l in labelings {
        let alpha = labeling_coefficients(&l);
        table
            .entry(alpha.entries.clone())
            .and_modify(|c| c.population += 1)
            .or_insert(LabelingClass {
                alpha,
                witness: l,
                population: 1,
            });
    }
    order_labelings_high_snr(table.into_values().collect())
}

/// Number of distinct-BER labelings and the class table behind it.
pub fn count_distinct_ber_labelings(size: usize) -> Result<(usize, Vec<LabelingClass>)> {
    let classes = census(enumerate_labelings(size)?);
    Ok((classes.len(), classes))
}

/// Lexicographic ascending order on `(alpha_1, alpha_2, ...)`.
pub fn order_labelings_high_snr(mut classes: Vec<LabelingClass>) -> Vec<LabelingClass> {
    classes.sort_by(|a, b| a.alpha.high_snr_cmp(&b.alpha));
    classes
}

pub fn distinct_alpha1_count(classes: &[LabelingClass]) -> usize {
    let mut v: Vec<i64> = classes.iter().map(|c| c.alpha.entries[0]).collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic_ber::a_phi;
    use crate::constellation::{named_labeling, LabelingName};

    #[test]
    fn four_pam_space() {
        let all = enumerate_labelings(4).unwrap();
        // 6 patterns, 15 pairs, the 3 complementary pairs are invalid
        assert_eq!(all.len(), 12);
        let sets: Vec<_> = all.iter().map(Labeling::pattern_set).collect();
        assert!(sets.contains(&[3, 6].into_iter().collect()));
        assert!(!sets.contains(&[3, 12].into_iter().collect()));
        let (n, classes) = count_distinct_ber_labelings(4).unwrap();
        assert_eq!(n, 3);
        let alphas: Vec<_> = classes.iter().map(|c| c.alpha.entries.clone()).collect();
        assert_eq!(
            alphas,
            vec![vec![6, 4, -2], vec![8, -2, 2], vec![10, -2, 0]]
        );
    }

    #[test]
    fn eight_pam_space_matches_brute_force() {
        let all = enumerate_labelings(8).unwrap();
        let patterns = all_patterns(8).unwrap();
        let mut brute = 0;
        for a in 0..patterns.len() {
            for b in a + 1..patterns.len() {
                for c in b + 1..patterns.len() {
                    let ok =
                        Labeling::from_columns(vec![patterns[a], patterns[b], patterns[c]]).is_ok();
                    brute += usize::from(ok);
                }
            }
        }
        assert_eq!(all.len(), brute);
        // 8! ordered labelings, 3! column orders each
        assert_eq!(all.len(), 40320 / 6);
        assert!(all
            .iter()
            .any(|l| l.pattern_set() == [15, 60, 102].into_iter().collect()));
    }

    #[test]
    fn eight_pam_census() {
        let (n, classes) = count_distinct_ber_labelings(8).unwrap();
        assert_eq!(n, 460);
        assert_eq!(distinct_alpha1_count(&classes), 12);
        assert_eq!(classes[0].alpha.entries[0], 14);
        let brgc = labeling_coefficients(&named_labeling(LabelingName::Brgc, 8).unwrap());
        assert_eq!(classes[0].alpha, brgc);
        for c in &classes {
            assert_eq!(labeling_coefficients(&c.witness), c.alpha);
            assert!(a_phi(&c.alpha) >= 0);
        }
        let total: usize = classes.iter().map(|c| c.population).sum();
        assert_eq!(total, enumerate_labelings(8).unwrap().len());
    }

    #[test]
    fn exhaustive_limits() {
        assert!(matches!(
            enumerate_labelings(16),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(
            enumerate_labelings(6),
            Err(Error::NotPowerOfTwo(6))
        ));
    }

    #[test]
    fn sampling_is_seeded() {
        let a = sample_labelings(16, 20, 7).unwrap();
        let b = sample_labelings(16, 20, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_labelings(16, 20, 8).unwrap());
        for l in &a {
            assert_eq!(l.bits_per_symbol(), 4);
        }
    }

    #[test]
    fn alpha_invariances() {
        for l in sample_labelings(8, 50, 1)
            .unwrap()
            .into_iter()
            .chain(sample_labelings(16, 50, 2).unwrap())
        {
            let alpha = labeling_coefficients(&l);
            let mut cols = l.columns().to_vec();
            cols.reverse();
            cols[0] = cols[0].invert();
            let permuted = Labeling::from_columns(cols).unwrap();
            assert_eq!(labeling_coefficients(&permuted), alpha);
            assert_eq!(labeling_coefficients(&l.reflect()), alpha);
        }
    }
}
