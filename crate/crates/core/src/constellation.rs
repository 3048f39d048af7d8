//! One-dimensional constellations, bit patterns and binary labelings.
//!
//! Indices in this module are zero-based: point `i` is `s_{i+1}` and bit
//! position `j` is `b_{j+1}`. Pattern indices are big-endian over the
//! constellation positions, so the first point carries the most significant
//! bit of the index.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest constellation size representable by a [`BitPattern`].
pub const MAX_PATTERN_SIZE: usize = 64;

/// How the points of a [`Constellation`] were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpacingKind {
    EquallySpacedPam,
    Arbitrary,
}

/// Ordered set of real amplitudes `s_1 < s_2 < ... < s_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<f64>,
    kind: SpacingKind,
}

/// Half the distance between adjacent points of unit-energy `M`-PAM.
pub fn pam_half_spacing(size: usize) -> f64 {
    let m = size as f64;
    (3.0 / (m * m - 1.0)).sqrt()
}

/// Equally spaced unit-energy `M`-PAM, `s_i = -d (M - 2i + 1)`.
pub fn make_pam(size: usize) -> Result<Constellation> {
    Constellation::pam(size)
}

impl Constellation {
    pub fn pam(size: usize) -> Result<Self> {
        check_even_size(size)?;
        let d = pam_half_spacing(size);
        let points = (1..=size)
            .map(|i| -d * (size as f64 - 2.0 * i as f64 + 1.0))
            .collect();
        Ok(Self {
            points,
            kind: SpacingKind::EquallySpacedPam,
        })
    }

    /// Arbitrary constellation. Points must be finite, strictly increasing
    /// and of even count.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        check_even_size(points.len())?;
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing);
        }
        Ok(Self {
            points,
            kind: SpacingKind::Arbitrary,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn kind(&self) -> SpacingKind {
        self.kind
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|s| s * s).sum::<f64>() / self.size() as f64
    }

    /// Half the minimum spacing for PAM; `None` for arbitrary constellations.
    pub fn half_spacing(&self) -> Option<f64> {
        match self.kind {
            SpacingKind::EquallySpacedPam => Some(pam_half_spacing(self.size())),
            SpacingKind::Arbitrary => None,
        }
    }

    /// True if the points are symmetric about zero.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.size();
        (0..n / 2).all(|i| (self.points[i] + self.points[n - 1 - i]).abs() <= tol)
    }
}

fn check_even_size(size: usize) -> Result<()> {
    if size < 2 || !size.is_multiple_of(2) {
        return Err(Error::InvalidSize(size));
    }
    Ok(())
}

/// Length-`M` binary vector of Hamming weight `M/2`, stored as its index
/// `w = sum_i 2^(M-i) p_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitPattern {
    mask: u64,
    size: u8,
}

impl BitPattern {
    pub fn from_index(size: usize, index: u64) -> Result<Self> {
        check_even_size(size)?;
        if size > MAX_PATTERN_SIZE {
            return Err(Error::TooLarge {
                size,
                max: MAX_PATTERN_SIZE,
                what: "bit patterns",
            });
        }
        if size < 64 && index >> size != 0 {
            return Err(Error::InvalidPattern {
                index,
                size,
                reason: "index does not fit in the pattern length",
            });
        }
        if index.count_ones() as usize != size / 2 {
            return Err(Error::InvalidPattern {
                index,
                size,
                reason: "Hamming weight differs from half the length",
            });
        }
        Ok(Self {
            mask: index,
            size: size as u8,
        })
    }

    /// Builds a pattern from bits `p_1, ..., p_M` (each 0 or 1).
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut index = 0u64;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidArgument(format!(
                    "bit value {b} is not 0 or 1"
                )));
            }
            index = (index << 1) | u64::from(b);
        }
        Self::from_index(bits.len(), index)
    }

    /// Parses a decimal index (`102`), a bit string (`01100110`) or
    /// comma-separated bits (`0,1,1,0,0,1,1,0`).
    pub fn parse(size: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        let is_bit = |c: char| c == '0' || c == '1';
        if text.contains(',') {
            let bits = text
                .split(',')
                .map(|t| match t.trim() {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(Error::InvalidArgument(format!("`{other}` is not a bit"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if bits.len() != size {
                return Err(Error::LengthMismatch {
                    expected: size,
                    actual: bits.len(),
                });
            }
            return Self::from_bits(&bits);
        }
        if text.len() == size && text.chars().all(is_bit) {
            let bits: Vec<u8> = text.bytes().map(|b| b - b'0').collect();
            return Self::from_bits(&bits);
        }
        let index = text.parse::<u64>().map_err(|_| {
            Error::InvalidArgument(format!("`{text}` is not a pattern index or bit string"))
        })?;
        Self::from_index(size, index)
    }

    pub fn index(&self) -> u64 {
        self.mask
    }

    pub fn size(&self) -> usize {
        self.size as usize
    }

    /// Bit `p_{i+1}`.
    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        ((self.mask >> (self.size() - 1 - i)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.size()).map(|i| self.bit(i)).collect()
    }

    fn full_mask(&self) -> u64 {
        if self.size() == 64 {
            u64::MAX
        } else {
            (1u64 << self.size()) - 1
        }
    }

    /// `p'_i = p_{M+1-i}`.
    pub fn reflect(&self) -> Self {
        let shift = 64 - self.size();
        Self {
            mask: self.mask.reverse_bits() >> shift,
            size: self.size,
        }
    }

    /// `p'_i = 1 - p_i`.
    pub fn invert(&self) -> Self {
        Self {
            mask: !self.mask & self.full_mask(),
            size: self.size,
        }
    }
}

impl fmt::Display for BitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

/// Binary labeling of `M = 2^m` points, held as its `m` columns.
///
/// Row `i` is the label `c_{i+1}` of point `s_{i+1}`; column `j` is the
/// pattern of bit position `b_{j+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    columns: Vec<BitPattern>,
}

impl Labeling {
    /// Builds a labeling from its columns. Rows must be pairwise distinct.
    pub fn from_columns(columns: Vec<BitPattern>) -> Result<Self> {
        let m = columns.len();
        if m == 0 || m > 6 {
            return Err(Error::InvalidLabeling(format!(
                "{m} columns is outside 1..=6"
            )));
        }
        let size = columns[0].size();
        if size != 1 << m {
            return Err(Error::InvalidLabeling(format!(
                "{m} columns require {} points, patterns have length {size}",
                1usize << m
            )));
        }
        if let Some(c) = columns.iter().find(|c| c.size() != size) {
            return Err(Error::LengthMismatch {
                expected: size,
                actual: c.size(),
            });
        }
        let labeling = Self { columns };
        let mut seen = vec![false; size];
        for i in 0..size {
            let label = labeling.row(i) as usize;
            if seen[label] {
                return Err(Error::InvalidLabeling(format!(
                    "label {label:0m$b} is assigned to more than one point"
                )));
            }
            seen[label] = true;
        }
        Ok(labeling)
    }

    /// Builds a labeling from an ordered list of pattern indices `W`.
    pub fn from_pattern_indices(size: usize, indices: &[u64]) -> Result<Self> {
        let columns = indices
            .iter()
            .map(|&w| BitPattern::from_index(size, w))
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(columns)
    }

    /// Builds a labeling from per-point labels, `b_1` being the most
    /// significant bit of each label.
    pub fn from_row_labels(bits_per_symbol: usize, labels: &[u32]) -> Result<Self> {
        let size = 1usize << bits_per_symbol;
        if labels.len() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                actual: labels.len(),
            });
        }
        if labels.iter().any(|&l| l as usize >= size) {
            return Err(Error::InvalidLabeling("label out of range".into()));
        }
        let mut distinct = labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != size {
            return Err(Error::InvalidLabeling(
                "labels are not pairwise distinct".into(),
            ));
        }
        let columns = (0..bits_per_symbol)
            .map(|j| {
                let shift = bits_per_symbol - 1 - j;
                let index = labels
                    .iter()
                    .fold(0u64, |acc, &l| (acc << 1) | u64::from((l >> shift) & 1));
                BitPattern::from_index(size, index)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(columns)
    }

    pub fn size(&self) -> usize {
        self.columns[0].size()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[BitPattern] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> Result<BitPattern> {
        self.columns
            .get(j)
            .copied()
            .ok_or(Error::BitPositionOutOfRange {
                position: j,
                bits: self.bits_per_symbol(),
            })
    }

    /// `c_{i+1,j+1}`.
    #[inline]
    pub fn bit(&self, i: usize, j: usize) -> u8 {
        self.columns[j].bit(i)
    }

    /// Label of point `i` as an integer with `b_1` in the most significant bit.
    pub fn row(&self, i: usize) -> u32 {
        self.columns
            .iter()
            .fold(0u32, |acc, c| (acc << 1) | u32::from(c.bit(i)))
    }

    pub fn row_bits(&self, i: usize) -> Vec<u8> {
        self.columns.iter().map(|c| c.bit(i)).collect()
    }

    /// The set `W` of column indices.
    pub fn pattern_set(&self) -> BTreeSet<u64> {
        self.columns.iter().map(BitPattern::index).collect()
    }

    /// Mirrors the labeling about the constellation centre.
    pub fn reflect(&self) -> Self {
        Self {
            columns: self.columns.iter().map(BitPattern::reflect).collect(),
        }
    }
}

/// Named binary labelings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelingName {
    /// Binary reflected Gray code.
    Brgc,
    /// Natural binary code.
    Nbc,
    /// Folded binary code.
    Fbc,
    /// Binary semi-Gray code.
    Bsgc,
    /// Anti-Gray.
    Ag,
}

impl LabelingName {
    pub const ALL: [LabelingName; 5] = [Self::Brgc, Self::Nbc, Self::Fbc, Self::Bsgc, Self::Ag];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Brgc => "BRGC",
            Self::Nbc => "NBC",
            Self::Fbc => "FBC",
            Self::Bsgc => "BSGC",
            Self::Ag => "AG",
        }
    }
}

impl fmt::Display for LabelingName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelingName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BRGC" => Ok(Self::Brgc),
            "NBC" => Ok(Self::Nbc),
            "FBC" => Ok(Self::Fbc),
            "BSGC" => Ok(Self::Bsgc),
            "AG" => Ok(Self::Ag),
            _ => Err(Error::UnknownLabeling(s.to_string())),
        }
    }
}

/// Gray code labels by reflect-and-prefix: `G_1 = [0, 1]`,
/// `G_m = [0 G_{m-1}, 1 reverse(G_{m-1})]`.
fn reflected_gray_labels(bits_per_symbol: usize) -> Vec<u32> {
    if bits_per_symbol == 0 {
        return vec![0];
    }
    let prev = reflected_gray_labels(bits_per_symbol - 1);
    let top = 1u32 << (bits_per_symbol - 1);
    prev.iter()
        .copied()
        .chain(prev.iter().rev().map(|&l| l | top))
        .collect()
}

fn log2_exact(size: usize) -> Result<usize> {
    if size < 2 || !size.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(size));
    }
    Ok(size.trailing_zeros() as usize)
}

/// BRGC and NBC for any power of two up to 64 points; FBC, BSGC and AG only
/// for the sizes with known pattern sets.
pub fn named_labeling(name: LabelingName, size: usize) -> Result<Labeling> {
    let m = log2_exact(size)?;
    if size > MAX_PATTERN_SIZE {
        return Err(Error::TooLarge {
            size,
            max: MAX_PATTERN_SIZE,
            what: "labelings",
        });
    }
    let fixed: &[u64] = match (name, size) {
        (LabelingName::Brgc, _) => return Labeling::from_row_labels(m, &reflected_gray_labels(m)),
        (LabelingName::Nbc, _) => {
            let labels: Vec<u32> = (0..size as u32).collect();
            return Labeling::from_row_labels(m, &labels);
        }
        (LabelingName::Ag, 4) => &[5, 6],
        (LabelingName::Fbc, 8) => &[15, 60, 90],
        (LabelingName::Bsgc, 8) => &[105, 60, 102],
        (LabelingName::Ag, 8) => &[90, 105, 85],
        _ => {
            return Err(Error::UnsupportedLabeling {
                name: name.as_str(),
                size,
            })
        }
    };
    Labeling::from_pattern_indices(size, fixed)
}

/// Points `s_i` whose label bit `j` equals `u` (the set `X_{j,u}`).
pub fn subconstellation(
    labeling: &Labeling,
    constellation: &Constellation,
    j: usize,
    u: u8,
) -> Result<Vec<f64>> {
    let column = labeling.column(j)?;
    if column.size() != constellation.size() {
        return Err(Error::LengthMismatch {
            expected: constellation.size(),
            actual: column.size(),
        });
    }
    Ok(constellation
        .points()
        .iter()
        .enumerate()
        .filter(|&(i, _)| column.bit(i) == u)
        .map(|(_, &s)| s)
        .collect())
}

/// Number of valid length-`size` patterns, `C(M, M/2)`.
pub fn pattern_count(size: usize) -> u128 {
    binomial(size as u64, size as u64 / 2)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// All valid length-`size` patterns in increasing index order.
pub fn all_patterns(size: usize) -> Result<Vec<BitPattern>> {
    check_even_size(size)?;
    if size > 32 {
        return Err(Error::TooLarge {
            size,
            max: 32,
            what: "exhaustive pattern enumeration",
        });
    }
    Ok(CombinationIter::new(size, size / 2)
        .map(|mask| BitPattern {
            mask,
            size: size as u8,
        })
        .collect())
}

/// Masks of `n` bits with exactly `k` ones in increasing order (Gosper's hack).
struct CombinationIter {
    next: Option<u64>,
    limit: u64,
}

impl CombinationIter {
    fn new(n: usize, k: usize) -> Self {
        let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
        Self {
            next: Some(first),
            limit: 1u64 << n,
        }
    }
}

impl Iterator for CombinationIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let current = self.next?;
        self.next = if current == 0 {
            None
        } else {
            let c = current & current.wrapping_neg();
            let r = current + c;
            let succ = (((r ^ current) >> 2) / c) | r;
            (succ < self.limit).then_some(succ)
        };
        Some(current)
    }
}
