//! Pair-partition maps and peakless enumeration.
//!
//! A pair-partition map sends positions `1..=2m` to colors `1..=N` so that
//! every used color has exactly two preimages. It is stored as its label
//! sequence; block views are derived on demand. Positions in this API are
//! zero-based.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Color = u32;

/// Largest cardinality an enumerator will materialize unless configured otherwise.
pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    /// Refuse instances with more elements than this.
    pub cap: u64,
    /// Treat `m = 0` as the single empty partition instead of rejecting it.
    pub allow_empty: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            cap: DEFAULT_CAP,
            allow_empty: false,
        }
    }
}

impl EnumOptions {
    pub fn with_cap(cap: u64) -> Self {
        EnumOptions {
            cap,
            ..Self::default()
        }
    }
}

/// A map `{1..2m} -> {1..N}` whose nonempty fibers all have size two.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColorMap {
    labels: Vec<Color>,
    num_colors: Color,
}

impl ColorMap {
    pub fn new(labels: Vec<Color>, num_colors: Color) -> Result<Self> {
        if !labels.len().is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "pair map needs an even number of positions, got {}",
                labels.len()
            )));
        }
        let mut uses = vec![0usize; num_colors as usize + 1];
        for &c in &labels {
            if c == 0 || c > num_colors {
                return Err(Error::invalid(format!(
                    "color {c} outside 1..={num_colors}"
                )));
            }
            uses[c as usize] += 1;
        }
        if let Some(c) = uses.iter().position(|&u| u != 0 && u != 2) {
            return Err(Error::invalid(format!(
                "color {c} occurs {} times, expected exactly 2",
                uses[c]
            )));
        }
        Ok(ColorMap { labels, num_colors })
    }

    fn from_parts(labels: Vec<Color>, num_colors: Color) -> Self {
        debug_assert!(ColorMap::new(labels.clone(), num_colors).is_ok());
        ColorMap { labels, num_colors }
    }

    pub fn labels(&self) -> &[Color] {
        &self.labels
    }

    pub fn num_colors(&self) -> Color {
        self.num_colors
    }

    /// Number of blocks `m`.
    pub fn pairs(&self) -> usize {
        self.labels.len() / 2
    }

    /// Used colors in ascending order.
    pub fn colors(&self) -> Vec<Color> {
        let set: BTreeSet<Color> = self.labels.iter().copied().collect();
        set.into_iter().collect()
    }

    /// Blocks as `(color, first, second)` ordered by first position.
    pub fn blocks(&self) -> Vec<Block> {
        let mut first = vec![usize::MAX; self.num_colors as usize + 1];
        let mut out = Vec::with_capacity(self.pairs());
        for (pos, &c) in self.labels.iter().enumerate() {
            let slot = &mut first[c as usize];
            if *slot == usize::MAX {
                *slot = pos;
            } else {
                out.push(Block {
                    color: c,
                    first: *slot,
                    second: pos,
                });
            }
        }
        out.sort_by_key(|b| b.first);
        out
    }
}

impl fmt::Display for ColorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub color: Color,
    pub first: usize,
    pub second: usize,
}

/// Choices made by the painting construction: which `m` colors, and which
/// adjacent pair of unpainted positions receives each color, highest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PaintRank {
    /// Lexicographic rank of the color subset among the m-subsets of `1..=N`.
    pub subset_index: BigUint,
    /// `digits[k]` picks one of the `2(m - k) - 1` adjacent unpainted pairs.
    pub digits: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFlags {
    pub peakless: bool,
    pub noncrossing: bool,
    pub interval: bool,
    pub monotone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Filter,
    Paint,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "filter" => Ok(Method::Filter),
            "paint" => Ok(Method::Paint),
            other => Err(Error::invalid(format!("unknown method {other:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Filter => "filter",
            Method::Paint => "paint",
        })
    }
}

/// Positions that strictly exceed every adjacent position.
///
/// End positions have a single neighbor; a one-element sequence has its only
/// position as a peak. Equal neighbors disqualify.
pub fn peaks<T: Ord>(labels: &[T]) -> Result<Vec<usize>> {
    if labels.is_empty() {
        return Err(Error::invalid("peaks of an empty sequence"));
    }
    Ok((0..labels.len())
        .filter(|&s| {
            let left = s.checked_sub(1).is_none_or(|l| labels[s] > labels[l]);
            let right = labels.get(s + 1).is_none_or(|r| labels[s] > *r);
            left && right
        })
        .collect())
}

/// No position of the label sequence is a peak.
///
/// This single-pass test is not closed under removing blocks: in
/// `(1,2,3,3,1,2,4,4)` no position is a peak, but deleting the `4,4` pair
/// exposes one at the final `2`. See [`is_peakless`].
pub fn has_no_peak(labels: &[Color]) -> bool {
    labels.is_empty() || peaks(labels).map(|p| p.is_empty()).unwrap_or(true)
}

/// Peakless pair map: no peak, and none appears as the top-color pair is
/// repeatedly deleted.
///
/// When a pair map has no peak its top color necessarily sits on two adjacent
/// positions (otherwise each of them would be a peak), so the deletion is
/// well defined. These are exactly the maps produced by the painting
/// construction, and exactly the ones with weight 1 in the monotone moment
/// sum.
pub fn is_peakless(f: &ColorMap) -> bool {
    let mut labels = f.labels.clone();
    while !labels.is_empty() {
        if !has_no_peak(&labels) {
            return false;
        }
        let top = *labels.iter().max().expect("nonempty");
        labels.retain(|&c| c != top);
    }
    true
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `(2m - 1)!! = 1 * 3 * ... * (2m - 1)`, with `(-1)!! = 1`.
pub fn odd_double_factorial(m: u64) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, i| acc * (2 * i - 1))
}

pub fn catalan(k: u64) -> BigUint {
    binomial(2 * k, k) / (k + 1)
}

/// `|Pi({1..2m}, {1..N})| = C(N, m) m! (2m - 1)!!`.
pub fn pair_map_count(m: u32, n: u32) -> BigUint {
    binomial(n.into(), m.into()) * factorial(m.into()) * odd_double_factorial(m.into())
}

fn check_instance(m: u32, n: u32, opts: &EnumOptions) -> Result<()> {
    if m == 0 && !opts.allow_empty {
        return Err(Error::invalid(
            "m = 0 requires the empty-partition opt-in; the count is stated for m >= 1",
        ));
    }
    if m > n {
        return Err(Error::invalid(format!(
            "need m <= N, got m = {m}, N = {n}"
        )));
    }
    Ok(())
}

fn check_cap(count: BigUint, cap: u64) -> Result<()> {
    if count > BigUint::from(cap) {
        Err(Error::CapExceeded { count, cap })
    } else {
        Ok(())
    }
}

/// `C(N, m) (2m - 1)!!`, the number of peakless pair maps.
pub fn count_peakless(m: u32, n: u32) -> Result<BigUint> {
    count_peakless_opts(m, n, &EnumOptions::default())
}

pub fn count_peakless_opts(m: u32, n: u32, opts: &EnumOptions) -> Result<BigUint> {
    check_instance(m, n, opts)?;
    Ok(binomial(n.into(), m.into()) * odd_double_factorial(m.into()))
}

/// Every element of `Pi({1..2m}, {1..N})`, ascending lexicographically.
pub fn enumerate_pair_maps(m: u32, n: u32, opts: &EnumOptions) -> Result<Vec<ColorMap>> {
    check_instance(m, n, opts)?;
    let count = pair_map_count(m, n);
    check_cap(count.clone(), opts.cap)?;

    let len = 2 * m as usize;
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    let mut labels = Vec::with_capacity(len);
    let mut uses = vec![0u8; n as usize + 1];
    fill_pair_maps(len, n, &mut labels, &mut uses, 0, &mut out);
    Ok(out)
}

// Depth-first in ascending color order, so output is lexicographic. A color
// can be opened only if every open color still fits in the remaining slots;
// since placed = 2 * closed + open, the parity always works out and no branch
// dead-ends.
fn fill_pair_maps(
    len: usize,
    n: u32,
    labels: &mut Vec<Color>,
    uses: &mut [u8],
    open: usize,
    out: &mut Vec<ColorMap>,
) {
    let pos = labels.len();
    if pos == len {
        out.push(ColorMap::from_parts(labels.clone(), n));
        return;
    }
    let remaining_after = len - pos - 1;
    for c in 1..=n {
        let next_open = match uses[c as usize] {
            0 => open + 1,
            1 => open - 1,
            _ => continue,
        };
        if next_open > remaining_after {
            continue;
        }
        uses[c as usize] += 1;
        labels.push(c);
        fill_pair_maps(len, n, labels, uses, next_open, out);
        labels.pop();
        uses[c as usize] -= 1;
    }
}

/// Peakless pair maps, ascending lexicographically, by either method.
pub fn enumerate_peakless(
    m: u32,
    n: u32,
    method: Method,
    opts: &EnumOptions,
) -> Result<Vec<ColorMap>> {
    match method {
        Method::Filter => {
            let mut all = enumerate_pair_maps(m, n, opts)?;
            all.retain(is_peakless);
            Ok(all)
        }
        Method::Paint => {
            let count = count_peakless_opts(m, n, opts)?;
            check_cap(count, opts.cap)?;
            let mut out = paint_ranks(m, n)
                .map(|rank| paint_unrank(m, n, &rank))
                .collect::<Result<Vec<_>>>()?;
            out.sort();
            Ok(out)
        }
    }
}

/// Radix of the k-th painting digit (zero-based k): `2(m - k) - 1` pairs.
fn digit_radix(m: u32, k: usize) -> u32 {
    2 * (m - k as u32) - 1
}

/// All valid painting ranks, subset index ascending, digits counting as a
/// mixed-radix number with the first digit most significant.
pub fn paint_ranks(m: u32, n: u32) -> impl Iterator<Item = PaintRank> {
    let subsets = binomial(n.into(), m.into());
    let mut subset = BigUint::zero();
    let mut digits = vec![0u32; m as usize];
    let mut done = subsets.is_zero();
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let item = PaintRank {
            subset_index: subset.clone(),
            digits: digits.clone(),
        };
        // Advance the least significant digit first.
        let mut k = digits.len();
        loop {
            if k == 0 {
                digits.iter_mut().for_each(|d| *d = 0);
                subset += 1u32;
                done = subset >= subsets;
                break;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < digit_radix(m, k) {
                break;
            }
            digits[k] = 0;
        }
        Some(item)
    })
}

/// The m-subset of `1..=n` with the given lexicographic rank, ascending.
pub fn unrank_subset(n: u32, m: u32, index: &BigUint) -> Result<Vec<Color>> {
    let total = binomial(n.into(), m.into());
    if *index >= total {
        return Err(Error::invalid(format!(
            "subset index {index} out of range: there are {total} subsets of size {m} from {n}"
        )));
    }
    let mut rest = index.clone();
    let mut out = Vec::with_capacity(m as usize);
    let mut c = 1u32;
    while out.len() < m as usize {
        let needed = (m as usize - out.len() - 1) as u64;
        let with_c = binomial((n - c).into(), needed);
        if rest < with_c {
            out.push(c);
        } else {
            rest -= with_c;
        }
        c += 1;
    }
    Ok(out)
}

/// Runs the painting construction for one rank.
///
/// Colors are taken highest first; at step k the `digits[k]`-th adjacent pair
/// of still-unpainted positions (adjacency ignores painted positions) gets the
/// k-th highest color.
pub fn paint_unrank(m: u32, n: u32, rank: &PaintRank) -> Result<ColorMap> {
    if m > n {
        return Err(Error::invalid(format!(
            "need m <= N, got m = {m}, N = {n}"
        )));
    }
    if rank.digits.len() != m as usize {
        return Err(Error::invalid(format!(
            "expected {m} painting digits, got {}",
            rank.digits.len()
        )));
    }
    for (k, &d) in rank.digits.iter().enumerate() {
        let radix = digit_radix(m, k);
        if d >= radix {
            return Err(Error::invalid(format!(
                "painting digit {} is {d}, must be below {radix}",
                k + 1
            )));
        }
    }
    let mut colors = unrank_subset(n, m, &rank.subset_index)?;
    colors.reverse();

    let mut labels = vec![0; 2 * m as usize];
    let mut unpainted: Vec<usize> = (0..labels.len()).collect();
    for (&color, &d) in colors.iter().zip(&rank.digits) {
        let d = d as usize;
        let (left, right) = (unpainted[d], unpainted[d + 1]);
        labels[left] = color;
        labels[right] = color;
        unpainted.drain(d..=d + 1);
    }
    Ok(ColorMap::from_parts(labels, n))
}

pub fn classify(f: &ColorMap) -> ClassFlags {
    let blocks = f.blocks();
    let mut noncrossing = true;
    let mut nested_increasing = true;
    for (i, outer) in blocks.iter().enumerate() {
        // Blocks are sorted by first position, so only later blocks can start inside `outer`.
        for inner in &blocks[i + 1..] {
            if inner.first > outer.second {
                break;
            }
            if inner.second > outer.second {
                noncrossing = false;
            } else if inner.color <= outer.color {
                nested_increasing = false;
            }
        }
    }
    ClassFlags {
        peakless: is_peakless(f),
        noncrossing,
        interval: blocks.iter().all(|b| b.second == b.first + 1),
        monotone: noncrossing && nested_increasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(labels: &[Color], n: Color) -> ColorMap {
        ColorMap::new(labels.to_vec(), n).unwrap()
    }

    #[test]
    fn peaks_follow_strict_neighbor_rule() {
        assert_eq!(peaks(&[1, 2, 1]).unwrap(), vec![1]);
        assert!(peaks(&[1, 2, 2, 1]).unwrap().is_empty());
        assert_eq!(peaks(&[2, 1, 1, 2]).unwrap(), vec![0, 3]);
        assert_eq!(peaks(&[7]).unwrap(), vec![0]);
        assert!(matches!(peaks::<u32>(&[]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn peakless_examples() {
        assert!(is_peakless(&map(&[1, 2, 2, 1], 2)));
        assert!(!is_peakless(&map(&[1, 2, 1, 2], 2)));
        assert!(is_peakless(&map(&[1, 1], 1)));
    }

    #[test]
    fn single_pass_peak_test_is_weaker() {
        let f = map(&[1, 2, 3, 3, 1, 2, 4, 4], 4);
        assert!(has_no_peak(f.labels()));
        assert!(!is_peakless(&f));
        assert!(!classify(&f).noncrossing);
        let locally = enumerate_pair_maps(4, 4, &EnumOptions::default())
            .unwrap()
            .iter()
            .filter(|f| has_no_peak(f.labels()))
            .count();
        assert_eq!(locally, 129);
        assert_eq!(count_peakless(4, 4).unwrap(), BigUint::from(105u32));
    }

    #[test]
    fn color_map_rejects_bad_fibers() {
        assert!(ColorMap::new(vec![1, 2, 1], 2).is_err());
        assert!(ColorMap::new(vec![1, 1, 1, 1], 2).is_err());
        assert!(ColorMap::new(vec![1, 3, 3, 1], 2).is_err());
        assert!(ColorMap::new(vec![0, 0], 2).is_err());
        assert!(ColorMap::new(vec![], 3).is_ok());
    }

    #[test]
    fn pair_maps_small_cases() {
        let opts = EnumOptions::default();
        let one = enumerate_pair_maps(1, 1, &opts).unwrap();
        assert_eq!(one, vec![map(&[1, 1], 1)]);
        assert_eq!(enumerate_pair_maps(2, 2, &opts).unwrap().len(), 6);
        assert_eq!(enumerate_pair_maps(2, 3, &opts).unwrap().len(), 18);
        let all = enumerate_pair_maps(3, 4, &opts).unwrap();
        assert!(all.windows(2).all(|w| w[0].labels() < w[1].labels()));
    }

    #[test]
    fn instance_checks() {
        let opts = EnumOptions::default();
        assert!(matches!(
            enumerate_pair_maps(3, 2, &opts),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(count_peakless(3, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(count_peakless(0, 2), Err(Error::InvalidInput(_))));
        let empty = EnumOptions {
            allow_empty: true,
            ..opts
        };
        assert_eq!(count_peakless_opts(0, 2, &empty).unwrap(), BigUint::one());
        let maps = enumerate_pair_maps(0, 2, &empty).unwrap();
        assert_eq!(maps.len(), 1);
        assert!(maps[0].labels().is_empty());
        assert_eq!(enumerate_peakless(0, 0, Method::Paint, &empty).unwrap().len(), 1);
    }

    #[test]
    fn cap_guard_refuses_large_instances() {
        let err = enumerate_pair_maps(2, 3, &EnumOptions::with_cap(10)).unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                count: BigUint::from(18u32),
                cap: 10
            }
        );
        assert!(enumerate_peakless(2, 3, Method::Paint, &EnumOptions::with_cap(9)).is_ok());
        assert!(enumerate_peakless(2, 3, Method::Paint, &EnumOptions::with_cap(8)).is_err());
    }

    #[test]
    fn filter_peakless_two_pairs() {
        let got = enumerate_peakless(2, 2, Method::Filter, &EnumOptions::default()).unwrap();
        let expected = vec![map(&[1, 1, 2, 2], 2), map(&[1, 2, 2, 1], 2), map(&[2, 2, 1, 1], 2)];
        assert_eq!(got, expected);
        let painted = enumerate_peakless(2, 2, Method::Paint, &EnumOptions::default()).unwrap();
        assert_eq!(painted, expected);
        assert_eq!(
            enumerate_peakless(2, 3, Method::Paint, &EnumOptions::default())
                .unwrap()
                .len(),
            9
        );
    }

    #[test]
    fn paint_hand_examples() {
        let r = PaintRank {
            subset_index: BigUint::zero(),
            digits: vec![0],
        };
        assert_eq!(paint_unrank(1, 1, &r).unwrap(), map(&[1, 1], 1));
        let r = PaintRank {
            subset_index: BigUint::zero(),
            digits: vec![1, 0],
        };
        assert_eq!(paint_unrank(2, 2, &r).unwrap(), map(&[1, 2, 2, 1], 2));
    }

    #[test]
    fn paint_rejects_bad_ranks() {
        let too_big_digit = PaintRank {
            subset_index: BigUint::zero(),
            digits: vec![3, 0],
        };
        assert!(paint_unrank(2, 2, &too_big_digit).is_err());
        let second_digit = PaintRank {
            subset_index: BigUint::zero(),
            digits: vec![0, 1],
        };
        assert!(paint_unrank(2, 2, &second_digit).is_err());
        let bad_subset = PaintRank {
            subset_index: BigUint::from(3u32),
            digits: vec![0, 0],
        };
        assert!(paint_unrank(2, 3, &bad_subset).is_err());
        let short = PaintRank {
            subset_index: BigUint::zero(),
            digits: vec![0],
        };
        assert!(paint_unrank(2, 2, &short).is_err());
    }

    #[test]
    fn rank_iteration_order() {
        let ranks: Vec<_> = paint_ranks(2, 3).collect();
        assert_eq!(ranks.len(), 9);
        assert_eq!(ranks[0].digits, vec![0, 0]);
        assert_eq!(ranks[1].digits, vec![1, 0]);
        assert_eq!(ranks[2].digits, vec![2, 0]);
        assert_eq!(ranks[3].subset_index, BigUint::one());
    }

    #[test]
    fn subsets_unrank_lexicographically() {
        let all: Vec<_> = (0u32..10)
            .map(|i| unrank_subset(5, 3, &BigUint::from(i)).unwrap())
            .collect();
        assert_eq!(all[0], vec![1, 2, 3]);
        assert_eq!(all[9], vec![3, 4, 5]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(count_peakless(1, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(count_peakless(2, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(count_peakless(4, 6).unwrap(), BigUint::from(1575u32));
        assert_eq!(catalan(2), BigUint::from(2u32));
        assert_eq!(catalan(4), BigUint::from(14u32));
        assert_eq!(pair_map_count(4, 6), BigUint::from(37800u32));
    }

    #[test]
    fn classify_examples() {
        let nested = classify(&map(&[1, 2, 2, 1], 2));
        assert_eq!(
            nested,
            ClassFlags {
                peakless: true,
                noncrossing: true,
                interval: false,
                monotone: true
            }
        );
        let crossing = classify(&map(&[1, 2, 1, 2], 2));
        assert_eq!(
            crossing,
            ClassFlags {
                peakless: false,
                noncrossing: false,
                interval: false,
                monotone: false
            }
        );
        let flat = classify(&map(&[1, 1, 2, 2], 2));
        assert!(flat.peakless && flat.noncrossing && flat.interval && flat.monotone);
        let inverted = classify(&map(&[2, 1, 1, 2], 2));
        assert!(inverted.noncrossing && !inverted.monotone && !inverted.peakless);
    }
}
