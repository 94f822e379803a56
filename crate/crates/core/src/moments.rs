//! Mixed moments under monotone independence.
//!
//! Letters of a word are formal, non-scalar variables; each color (variable
//! index) carries a sequence of single-variable moments `mu_k = phi(a^k)`.
//! A mixed moment is reduced by repeatedly factoring out a block that is a
//! peak of the color sequence, after collapsing runs of one color into a
//! power.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial, catalan, enumerate_pair_maps, odd_double_factorial, factorial, Color, ColorMap,
    EnumOptions,
};
use crate::error::{Error, Result};

/// Moments `mu_0, ..., mu_K` of a single variable, with `mu_0 = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSequence {
    moments: Vec<BigRational>,
}

impl MomentSequence {
    pub fn new(moments: Vec<BigRational>) -> Result<Self> {
        match moments.first() {
            Some(m0) if m0.is_one() => Ok(MomentSequence { moments }),
            Some(m0) => Err(Error::invalid(format!(
                "state must be unital: mu_0 = {m0}, expected 1"
            ))),
            None => Err(Error::invalid("moment sequence needs at least mu_0")),
        }
    }

    /// Symmetric Bernoulli: `mu_k = 0` for odd k, `1` for even k.
    pub fn bernoulli(max_order: usize) -> Self {
        let moments = (0..=max_order)
            .map(|k| {
                if k % 2 == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        MomentSequence { moments }
    }

    pub fn max_order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<&BigRational> {
        self.moments.get(k)
    }

    pub fn moments(&self) -> &[BigRational] {
        &self.moments
    }

    pub fn is_centered(&self) -> bool {
        self.moments.get(1).is_some_and(Zero::is_zero)
    }

    /// Centered with unit variance.
    pub fn is_standardized(&self) -> bool {
        self.is_centered() && self.moments.get(2).is_some_and(One::is_one)
    }

    /// All odd moments vanish.
    pub fn is_symmetric(&self) -> bool {
        self.moments.iter().skip(1).step_by(2).all(Zero::is_zero)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MomentDocument =
            serde_json::from_str(text).map_err(|e| Error::MomentFormat(e.to_string()))?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MomentDocument::from(self)).expect("moment document serializes")
    }
}

/// On-disk form: `{"max_order": K, "moments": ["1", "0", "1", ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentDocument {
    pub max_order: usize,
    pub moments: Vec<String>,
}

impl TryFrom<MomentDocument> for MomentSequence {
    type Error = Error;

    fn try_from(doc: MomentDocument) -> Result<Self> {
        if doc.moments.len() != doc.max_order + 1 {
            return Err(Error::MomentFormat(format!(
                "max_order is {} but {} moments were given (expected {})",
                doc.max_order,
                doc.moments.len(),
                doc.max_order + 1
            )));
        }
        let moments = doc
            .moments
            .iter()
            .enumerate()
            .map(|(k, s)| {
                parse_rational(s).map_err(|e| Error::MomentFormat(format!("moment {k}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if !moments[0].is_one() {
            return Err(Error::MomentFormat(format!(
                "mu_0 must be 1, got {}",
                doc.moments[0]
            )));
        }
        MomentSequence::new(moments)
    }
}

impl From<&MomentSequence> for MomentDocument {
    fn from(seq: &MomentSequence) -> Self {
        MomentDocument {
            max_order: seq.max_order(),
            moments: seq.moments.iter().map(ToString::to_string).collect(),
        }
    }
}

/// Parses `"p/q"` or an integer string into an exact rational.
pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| format!("{s:?} is not a rational"))?;
    let den = BigInt::from_str(den).map_err(|_| format!("{s:?} is not a rational"))?;
    if den.is_zero() {
        return Err(format!("{s:?} has a zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Where the reducer finds each color's moment sequence.
pub trait MomentLookup: Sync {
    fn sequence(&self, color: Color) -> Option<&MomentSequence>;
}

/// One sequence shared by every color (the identically distributed case).
impl MomentLookup for MomentSequence {
    fn sequence(&self, _color: Color) -> Option<&MomentSequence> {
        Some(self)
    }
}

/// Color `c` uses element `c - 1`.
impl MomentLookup for [MomentSequence] {
    fn sequence(&self, color: Color) -> Option<&MomentSequence> {
        color.checked_sub(1).and_then(|i| self.get(i as usize))
    }
}

impl MomentLookup for Vec<MomentSequence> {
    fn sequence(&self, color: Color) -> Option<&MomentSequence> {
        self.as_slice().sequence(color)
    }
}

impl MomentLookup for BTreeMap<Color, MomentSequence> {
    fn sequence(&self, color: Color) -> Option<&MomentSequence> {
        self.get(&color)
    }
}

/// A word `a_{c_1} a_{c_2} ... a_{c_n}` given by its color sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Color>);

impl Word {
    pub fn new(colors: Vec<Color>) -> Result<Self> {
        if let Some(pos) = colors.iter().position(|&c| c == 0) {
            return Err(Error::invalid(format!(
                "variable indices are positive; position {pos} is 0"
            )));
        }
        Ok(Word(colors))
    }

    pub fn colors(&self) -> &[Color] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word with position `pos` removed.
    pub fn without(&self, pos: usize) -> Word {
        let mut colors = self.0.clone();
        colors.remove(pos);
        Word(colors)
    }

    /// How often each color occurs.
    pub fn multiplicities(&self) -> BTreeMap<Color, usize> {
        let mut out = BTreeMap::new();
        for &c in &self.0 {
            *out.entry(c).or_insert(0) += 1;
        }
        out
    }
}

impl From<&ColorMap> for Word {
    fn from(f: &ColorMap) -> Self {
        Word(f.labels().to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunBlock {
    pub color: Color,
    pub power: usize,
}

/// Run-length form of a word; adjacent blocks always differ in color.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockWord {
    blocks: Vec<RunBlock>,
}

impl BlockWord {
    pub fn blocks(&self) -> &[RunBlock] {
        &self.blocks
    }

    pub fn expand(&self) -> Word {
        Word(
            self.blocks
                .iter()
                .flat_map(|b| std::iter::repeat_n(b.color, b.power))
                .collect(),
        )
    }

    /// Indices of blocks whose color exceeds both neighbors' colors.
    pub fn peak_blocks(&self) -> Vec<usize> {
        let colors: Vec<Color> = self.blocks.iter().map(|b| b.color).collect();
        if colors.is_empty() {
            return Vec::new();
        }
        crate::combinatorics::peaks(&colors).expect("nonempty")
    }

    /// Deletes block `i` and fuses its neighbors when they now share a color.
    fn remove(&mut self, i: usize) -> RunBlock {
        let removed = self.blocks.remove(i);
        if i > 0 && i < self.blocks.len() && self.blocks[i - 1].color == self.blocks[i].color {
            let right = self.blocks.remove(i);
            self.blocks[i - 1].power += right.power;
        }
        removed
    }
}

pub fn merge_runs(word: &Word) -> BlockWord {
    let mut blocks: Vec<RunBlock> = Vec::new();
    for &c in word.colors() {
        match blocks.last_mut() {
            Some(last) if last.color == c => last.power += 1,
            _ => blocks.push(RunBlock { color: c, power: 1 }),
        }
    }
    BlockWord { blocks }
}

fn check_orders<L: MomentLookup + ?Sized>(word: &Word, moments: &L) -> Result<()> {
    for (color, required) in word.multiplicities() {
        let seq = moments
            .sequence(color)
            .ok_or(Error::MissingSequence { color })?;
        if seq.max_order() < required {
            return Err(Error::InsufficientMoments {
                color,
                required,
                available: seq.max_order(),
            });
        }
    }
    Ok(())
}

fn moment_of<L: MomentLookup + ?Sized>(moments: &L, block: RunBlock) -> BigRational {
    // Orders were checked up front; a block's power never exceeds its color's multiplicity.
    moments
        .sequence(block.color)
        .and_then(|s| s.get(block.power))
        .cloned()
        .expect("moment orders checked")
}

/// `phi(a_{c_1} ... a_{c_n})` under monotone independence.
///
/// Factors out the leftmost block of the globally largest color at each step;
/// that block is always a peak because its neighbors carry distinct, smaller
/// colors.
pub fn reduce_monotone<L: MomentLookup + ?Sized>(word: &Word, moments: &L) -> Result<BigRational> {
    reduce_by_peaks(word, moments, |blocks, _peaks| {
        let top = blocks.iter().map(|b| b.color).max().expect("nonempty");
        blocks.iter().position(|b| b.color == top).expect("max exists")
    })
}

/// Reduction with a caller-chosen peak at every step.
///
/// `choose` receives the current blocks and the indices of its peak blocks and
/// must return one of those indices.
pub fn reduce_by_peaks<L, F>(word: &Word, moments: &L, mut choose: F) -> Result<BigRational>
where
    L: MomentLookup + ?Sized,
    F: FnMut(&[RunBlock], &[usize]) -> usize,
{
    check_orders(word, moments)?;
    let mut blocks = merge_runs(word);
    let mut acc = BigRational::one();
    while blocks.blocks.len() > 1 {
        let peaks = blocks.peak_blocks();
        let i = choose(&blocks.blocks, &peaks);
        if !peaks.contains(&i) {
            return Err(Error::invalid(format!(
                "block {i} is not a peak of the current block word"
            )));
        }
        let block = blocks.remove(i);
        acc *= moment_of(moments, block);
        if acc.is_zero() {
            return Ok(acc);
        }
    }
    if let Some(&last) = blocks.blocks.first() {
        acc *= moment_of(moments, last);
    }
    Ok(acc)
}

/// Weight of a pair map in the pair-partition moment sum, every color sharing `mu`.
pub fn pair_partition_weight(f: &ColorMap, mu: &MomentSequence) -> Result<BigRational> {
    reduce_monotone(&Word::from(f), mu)
}

/// Checks the singleton factorization `phi(w) = mu(1) * phi(w without s)` at
/// zero-based position `s`, whose color must occur nowhere else.
pub fn verify_singleton<L: MomentLookup + ?Sized>(
    word: &Word,
    s: usize,
    moments: &L,
) -> Result<bool> {
    let color = *word
        .colors()
        .get(s)
        .ok_or_else(|| Error::invalid(format!("position {s} outside word of length {}", word.len())))?;
    if word.colors().iter().filter(|&&c| c == color).count() != 1 {
        return Err(Error::invalid(format!(
            "position {s} (color {color}) is not a singleton"
        )));
    }
    let lhs = reduce_monotone(word, moments)?;
    let first = moments
        .sequence(color)
        .and_then(|seq| seq.get(1))
        .cloned()
        .ok_or(Error::InsufficientMoments {
            color,
            required: 1,
            available: 0,
        })?;
    let rhs = first * reduce_monotone(&word.without(s), moments)?;
    Ok(lhs == rhs)
}

/// Restricted growth strings of set partitions of `0..len` whose blocks all
/// have at least `min_block` elements.
fn set_partitions(len: usize, min_block: usize) -> Vec<(Vec<usize>, usize)> {
    fn go(
        rgs: &mut Vec<usize>,
        sizes: &mut Vec<usize>,
        len: usize,
        min_block: usize,
        out: &mut Vec<(Vec<usize>, usize)>,
    ) {
        let remaining = len - rgs.len();
        let deficit: usize = sizes.iter().map(|&s| min_block.saturating_sub(s)).sum();
        if deficit > remaining {
            return;
        }
        if remaining == 0 {
            out.push((rgs.clone(), sizes.len()));
            return;
        }
        for b in 0..=sizes.len() {
            if b == sizes.len() {
                sizes.push(0);
            }
            sizes[b] += 1;
            rgs.push(b);
            go(rgs, sizes, len, min_block, out);
            rgs.pop();
            sizes[b] -= 1;
            if sizes[b] == 0 {
                sizes.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(len), &mut Vec::new(), len, min_block, &mut out);
    out
}

/// `phi(S_N^m)` with `S_N = a_1 + ... + a_N`, all variables sharing `mu`.
///
/// Words are grouped by their order pattern: a pattern using `k` distinct
/// values stands for `C(N, k)` words with the same reduced moment. When
/// `mu_1 = 0` patterns with a singleton color are skipped, since they reduce
/// to zero.
pub fn sum_moment(n: u32, m: usize, mu: &MomentSequence) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::invalid("need at least one variable"));
    }
    if mu.max_order() < m {
        return Err(Error::InsufficientMoments {
            color: 1,
            required: m,
            available: mu.max_order(),
        });
    }
    let min_block = if mu.is_centered() { 2 } else { 1 };
    let partitions = set_partitions(m, min_block);
    partitions
        .par_iter()
        .filter(|(_, k)| *k as u32 <= n)
        .map(|(rgs, k)| -> Result<BigRational> {
            let weight = BigRational::from_integer(binomial(n.into(), *k as u64).into());
            let mut total = BigRational::zero();
            for order in (1..=*k as Color).permutations(*k) {
                let word = Word(rgs.iter().map(|&b| order[b]).collect());
                total += reduce_monotone(&word, mu)?;
            }
            Ok(total * weight)
        })
        .try_reduce(BigRational::zero, |a, b| Ok(a + b))
}

/// Direct sum of `reduce_monotone` over all `N^m` words; allows a different
/// sequence per color.
pub fn sum_moment_direct<L: MomentLookup + ?Sized>(
    n: u32,
    m: usize,
    moments: &L,
    cap: u64,
) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::invalid("need at least one variable"));
    }
    let count = BigUint::from(n).pow(m as u32);
    if count > BigUint::from(cap) {
        return Err(Error::CapExceeded { count, cap });
    }
    let mut total = BigRational::zero();
    for word in (0..m).map(|_| 1..=n).multi_cartesian_product() {
        total += reduce_monotone(&Word(word), moments)?;
    }
    if m == 0 {
        // The empty product is the unit.
        total = BigRational::one();
    }
    Ok(total)
}

/// `phi((S_N / sqrt N)^m)`: exact for even `m`, floating for odd `m`.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalizedMoment {
    Exact(BigRational),
    Approximate(f64),
}

impl NormalizedMoment {
    pub fn to_f64(&self) -> f64 {
        match self {
            NormalizedMoment::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            NormalizedMoment::Approximate(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            NormalizedMoment::Exact(r) => Some(r),
            NormalizedMoment::Approximate(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NormalizedMoment::Exact(r) => r.is_zero(),
            NormalizedMoment::Approximate(x) => *x == 0.0,
        }
    }
}

pub fn normalized_moment(n: u32, m: usize, mu: &MomentSequence) -> Result<NormalizedMoment> {
    let sum = sum_moment(n, m, mu)?;
    let half = BigRational::from_integer(BigInt::from(n).pow((m / 2) as u32));
    let scaled = sum / half;
    if m.is_multiple_of(2) {
        Ok(NormalizedMoment::Exact(scaled))
    } else if scaled.is_zero() {
        Ok(NormalizedMoment::Approximate(0.0))
    } else {
        // One leftover factor of N^{-1/2}.
        let value = scaled.to_f64().unwrap_or(f64::NAN) / f64::from(n).sqrt();
        Ok(NormalizedMoment::Approximate(value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairSumMode {
    /// Sum over pair patterns on `m` colors, each weighted by `C(N, m)`.
    #[default]
    Grouped,
    /// Sum over every element of `Pi({1..2m}, {1..N})`.
    Enumerate,
}

/// `N^{-m} * sum over pair maps f of phi(a_f)`, for a moment of even order `2m`.
pub fn pair_partition_normalized_sum(
    n: u32,
    order: usize,
    mu: &MomentSequence,
    mode: PairSumMode,
    opts: &EnumOptions,
) -> Result<BigRational> {
    if !order.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "pair partitions need an even order, got {order}"
        )));
    }
    let m = (order / 2) as u32;
    if m > n {
        return Err(Error::invalid(format!(
            "need m <= N, got m = {m}, N = {n}"
        )));
    }
    let sum = match mode {
        PairSumMode::Enumerate => enumerate_pair_maps(m, n, opts)?
            .iter()
            .map(|f| pair_partition_weight(f, mu))
            .sum::<Result<BigRational>>()?,
        PairSumMode::Grouped => {
            let patterns = enumerate_pair_maps(m, m, opts)?;
            let per_pattern = patterns
                .iter()
                .map(|f| pair_partition_weight(f, mu))
                .sum::<Result<BigRational>>()?;
            // Each pair pattern uses all m labels; the maps with that pattern
            // correspond to the m-subsets of colors.
            per_pattern * BigRational::from_integer(binomial(n.into(), m.into()).into())
        }
    };
    Ok(sum / BigRational::from_integer(BigInt::from(n).pow(m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Independence {
    Monotone,
    Commutative,
    Free,
    Boolean,
}

impl Independence {
    pub const ALL: [Independence; 4] = [
        Independence::Monotone,
        Independence::Commutative,
        Independence::Free,
        Independence::Boolean,
    ];
}

impl fmt::Display for Independence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Independence::Monotone => "monotone",
            Independence::Commutative => "commutative",
            Independence::Free => "free",
            Independence::Boolean => "boolean",
        })
    }
}

impl FromStr for Independence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Independence::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::invalid(format!("unknown independence class {s:?}")))
    }
}

/// The m-th moment of the central limit law for the given independence.
///
/// Odd moments vanish. For `m = 2k`: monotone gives the arcsine moment
/// `(2k-1)!!/k!`, commutative the Gaussian `(2k-1)!!`, free the Catalan
/// number, Boolean 1.
pub fn limit_moment(m: usize, class: Independence) -> BigRational {
    if m % 2 == 1 {
        return BigRational::zero();
    }
    let k = (m / 2) as u64;
    let int = |v: BigUint| BigRational::from_integer(v.into());
    match class {
        Independence::Monotone => int(odd_double_factorial(k)) / int(factorial(k)),
        Independence::Commutative => int(odd_double_factorial(k)),
        Independence::Free => int(catalan(k)),
        Independence::Boolean => BigRational::one(),
    }
}

/// `M_0, ..., M_K` for one independence class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitMoments {
    pub class: Independence,
    pub values: Vec<BigRational>,
}

impl LimitMoments {
    pub fn new(class: Independence, max_order: usize) -> Self {
        LimitMoments {
            class,
            values: (0..=max_order).map(|m| limit_moment(m, class)).collect(),
        }
    }
}

/// `|a - b|` for exact values.
pub fn abs_diff(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}
