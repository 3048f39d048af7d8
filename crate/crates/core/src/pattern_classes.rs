//! Equivalence classes of patterns under reflection and inversion.
//!
//! On a symmetric equally spaced constellation the pattern BER is unchanged
//! by mirroring the pattern or complementing it, so every class shares one
//! coefficient vector.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::analytic_ber::{pattern_coefficients, CoefficientVector};
use crate::constellation::{all_patterns, binomial, BitPattern};
use crate::error::{Error, Result};

/// Largest size accepted by exhaustive class enumeration.
pub const MAX_EXHAUSTIVE_SIZE: usize = 16;

pub fn reflect(p: &BitPattern) -> BitPattern {
    p.reflect()
}

pub fn invert(p: &BitPattern) -> BitPattern {
    p.invert()
}

/// Symmetry type of a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetry {
    /// Reflected: `refl(p) = p`.
    Re,
    /// Anti-reflected: `inv(refl(p)) = p`.
    Are,
    /// Asymmetric.
    Asy,
}

impl Symmetry {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Re => "RE",
            Self::Are => "ARE",
            Self::Asy => "ASY",
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(p: &BitPattern) -> Symmetry {
    let r = p.reflect();
    if r == *p {
        Symmetry::Re
    } else if r.invert() == *p {
        Symmetry::Are
    } else {
        Symmetry::Asy
    }
}

/// The orbit `{p, inv(p), refl(p), inv(refl(p))}`, sorted by index.
pub fn orbit(p: &BitPattern) -> Vec<BitPattern> {
    let r = p.reflect();
    let set: BTreeSet<BitPattern> = [*p, p.invert(), r, r.invert()].into_iter().collect();
    set.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternClass {
    /// Member with the smallest index.
    pub representative: BitPattern,
    /// Member indices in increasing order.
    pub members: Vec<u64>,
    pub symmetry: Symmetry,
    pub coefficients: CoefficientVector,
}

/// Closed-form class count `(C(M, M/2) + C(M/2, M/4) + 2^(M/2)) / 4`.
pub fn class_count_formula(size: usize) -> Result<u128> {
    check_multiple_of_four(size, "class counting")?;
    let n = size as u64;
    Ok((binomial(n, n / 2) + binomial(n / 2, n / 4) + (1u128 << (size / 2))) / 4)
}

fn check_multiple_of_four(size: usize, what: &'static str) -> Result<()> {
    if size == 0 || !size.is_multiple_of(4) {
        return Err(Error::NotMultipleOfFour { size, what });
    }
    Ok(())
}

fn patterns_for_classes(size: usize) -> Result<Vec<BitPattern>> {
    check_multiple_of_four(size, "pattern classes")?;
    if size > MAX_EXHAUSTIVE_SIZE {
        return Err(Error::TooLarge {
            size,
            max: MAX_EXHAUSTIVE_SIZE,
            what: "exhaustive class enumeration",
        });
    }
    all_patterns(size)
}

/// All pattern classes for `M`-PAM, best first at high SNR (lexicographic
/// coefficient order, ties by representative index).
pub fn enumerate_classes(size: usize) -> Result<Vec<PatternClass>> {
    let patterns = patterns_for_classes(size)?;
    let mut by_rep: BTreeMap<BitPattern, Vec<u64>> = BTreeMap::new();
    for p in &patterns {
        let members = orbit(p);
        let rep = members[0];
        by_rep
            .entry(rep)
            .or_insert_with(|| members.iter().map(BitPattern::index).collect());
    }
    let mut classes: Vec<PatternClass> = by_rep
        .into_iter()
        .map(|(rep, members)| PatternClass {
            representative: rep,
            members,
            symmetry: classify(&rep),
            coefficients: pattern_coefficients(&rep),
        })
        .collect();
    classes.sort_by(|a, b| {
        a.coefficients
            .high_snr_cmp(&b.coefficients)
            .then(a.representative.cmp(&b.representative))
    });
    Ok(classes)
}

/// Groups of distinct classes sharing one full coefficient vector.
pub fn duplicate_coefficient_classes(classes: &[PatternClass]) -> Vec<Vec<u64>> {
    let mut by_vec: BTreeMap<&[i64], Vec<u64>> = BTreeMap::new();
    for c in classes {
        by_vec
            .entry(&c.coefficients.entries)
            .or_default()
            .push(c.representative.index());
    }
    by_vec.into_values().filter(|v| v.len() > 1).collect()
}

/// Number of distinct `a_1` values over all patterns.
pub fn distinct_a1_count(size: usize) -> Result<usize> {
    let patterns = patterns_for_classes(size)?;
    let values: BTreeSet<i64> = patterns
        .iter()
        .map(|p| pattern_coefficients(p).entries[0])
        .collect();
    Ok(values.len())
}

/// Counts of RE, ARE and ASY patterns.
pub fn symmetry_counts(size: usize) -> Result<[usize; 3]> {
    let mut counts = [0; 3];
    for p in patterns_for_classes(size)? {
        counts[classify(&p) as usize] += 1;
    }
    Ok(counts)
}
