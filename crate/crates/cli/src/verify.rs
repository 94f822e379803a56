//! Desk-scale verification suite behind `mclt verify`.
//!
//! Each property either passes, fails with a named counterexample, or is
//! skipped when an enumeration runs into the configured cap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use monotone_clt::arcsine::{arcsine_moment_closed, arcsine_moment_quadrature, QuadratureSpec};
use monotone_clt::combinatorics::{
    binomial, count_peakless, enumerate_pair_maps, enumerate_peakless, is_peakless, odd_double_factorial,
    factorial, paint_ranks, paint_unrank, classify, Color, ColorMap, EnumOptions, Method,
};
use monotone_clt::moments::{
    limit_moment, normalized_moment, pair_partition_normalized_sum, pair_partition_weight,
    reduce_by_peaks, reduce_monotone, sum_moment, sum_moment_direct, verify_singleton,
    Independence, MomentSequence, PairSumMode, Word,
};
use monotone_clt::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classes::class_rows;

pub type CountFn = fn(u32, u32) -> Result<BigUint>;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub cap: u64,
    pub tolerance: f64,
    pub seed: u64,
    pub random_words: usize,
    /// Closed-form peakless count under test.
    pub count_peakless: CountFn,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            cap: monotone_clt::combinatorics::DEFAULT_CAP,
            tolerance: 1e-10,
            seed: 0x5eed,
            random_words: 200,
            count_peakless,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail(String),
    Skip(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub results: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results
            .iter()
            .all(|r| !matches!(r.status, Status::Fail(_)))
    }

    pub fn first_failure(&self) -> Option<(&'static str, &str)> {
        self.results.iter().find_map(|r| match &r.status {
            Status::Fail(why) => Some((r.name, why.as_str())),
            _ => None,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let _ = match &r.status {
                Status::Pass => writeln!(out, "PASS {}", r.name),
                Status::Fail(why) => writeln!(out, "FAIL {}: {why}", r.name),
                Status::Skip(why) => writeln!(out, "SKIP {}: {why}", r.name),
            };
        }
        let count = |f: fn(&Status) -> bool| self.results.iter().filter(|r| f(&r.status)).count();
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} skipped",
            count(|s| matches!(s, Status::Pass)),
            count(|s| matches!(s, Status::Fail(_))),
            count(|s| matches!(s, Status::Skip(_))),
        );
        if let Some((name, why)) = self.first_failure() {
            let _ = writeln!(out, "first counterexample ({name}): {why}");
        }
        out
    }
}

/// `Ok(None)` passes, `Ok(Some(counterexample))` fails.
type Outcome = Result<Option<String>>;

type Property = (&'static str, fn(&VerifyConfig) -> Outcome);

const PROPERTIES: &[Property] = &[
    ("lemma-count", lemma_count),
    ("paint-bijection", paint_bijection),
    ("lemma-recursion", lemma_recursion),
    ("color-subset-factorization", color_subset_factorization),
    ("top-color-adjacent", top_color_adjacent),
    ("peakless-iff-monotone", peakless_iff_monotone),
    ("contribution-dichotomy", contribution_dichotomy),
    ("singleton-condition", singleton_condition),
    ("peak-choice-independence", peak_choice_independence),
    ("pattern-grouping-exact", pattern_grouping_exact),
    ("odd-moments-vanish", odd_moments_vanish),
    ("clt-convergence", clt_convergence),
    ("pair-sum-consistency", pair_sum_consistency),
    ("count-limit", count_limit),
    ("arcsine-quadrature", arcsine_quadrature),
    ("arcsine-moments", arcsine_moments),
    ("four-class-limits", four_class_limits),
];

pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|(name, _)| *name).collect()
}

pub fn run(config: &VerifyConfig) -> VerifyReport {
    let results = PROPERTIES
        .iter()
        .map(|(name, check)| {
            let status = match check(config) {
                Ok(None) => Status::Pass,
                Ok(Some(cex)) => Status::Fail(cex),
                Err(e @ Error::CapExceeded { .. }) => Status::Skip(e.to_string()),
                Err(e) => Status::Fail(e.to_string()),
            };
            PropertyResult { name, status }
        })
        .collect();
    VerifyReport { results }
}

fn opts(config: &VerifyConfig) -> EnumOptions {
    EnumOptions::with_cap(config.cap)
}

/// `(m, N)` with `1 <= m <= 4`, `m <= N <= 6`.
fn lemma_range() -> impl Iterator<Item = (u32, u32)> {
    (1..=4).flat_map(|m| (m..=6).map(move |n| (m, n)))
}

/// `(m, N)` with `2m <= 8`, `m <= N <= 5`.
fn small_range() -> impl Iterator<Item = (u32, u32)> {
    (1..=4).flat_map(|m| (m..=5).map(move |n| (m, n)))
}

fn lemma_count(config: &VerifyConfig) -> Outcome {
    for (m, n) in lemma_range() {
        let filter = enumerate_peakless(m, n, Method::Filter, &opts(config))?.len();
        let paint = enumerate_peakless(m, n, Method::Paint, &opts(config))?.len();
        let formula = (config.count_peakless)(m, n)?;
        if BigUint::from(filter) != formula || filter != paint {
            return Ok(Some(format!(
                "m={m}, N={n}: filter {filter}, paint {paint}, formula {formula}"
            )));
        }
    }
    Ok(None)
}

fn paint_bijection(config: &VerifyConfig) -> Outcome {
    for (m, n) in lemma_range() {
        let filtered: BTreeSet<ColorMap> = enumerate_peakless(m, n, Method::Filter, &opts(config))?
            .into_iter()
            .collect();
        let mut image = BTreeSet::new();
        for rank in paint_ranks(m, n) {
            let f = paint_unrank(m, n, &rank)?;
            if !image.insert(f.clone()) {
                return Ok(Some(format!("m={m}, N={n}: {f} painted twice")));
            }
        }
        if image != filtered {
            let missing = filtered.symmetric_difference(&image).next();
            return Ok(Some(format!(
                "m={m}, N={n}: painted image differs from filter at {}",
                missing.map(ToString::to_string).unwrap_or_default()
            )));
        }
    }
    Ok(None)
}

fn lemma_recursion(config: &VerifyConfig) -> Outcome {
    for m in 2..=4u32 {
        let top = enumerate_peakless(m, m, Method::Filter, &opts(config))?;
        let below: BTreeSet<Vec<Color>> = enumerate_peakless(m - 1, m - 1, Method::Filter, &opts(config))?
            .into_iter()
            .map(|f| f.labels().to_vec())
            .collect();
        let mut seen = BTreeSet::new();
        for f in &top {
            let at: Vec<usize> = positions_of(f, m);
            if at[1] != at[0] + 1 {
                return Ok(Some(format!("{f}: top color not on adjacent positions")));
            }
            let rest: Vec<Color> = f.labels().iter().copied().filter(|&c| c != m).collect();
            if !below.contains(&rest) {
                return Ok(Some(format!("{f}: removing the top block leaves a map with a peak")));
            }
            seen.insert((at[0], rest));
        }
        let expected = (2 * m as usize - 1) * below.len();
        if seen.len() != top.len() || top.len() != expected {
            return Ok(Some(format!(
                "m={m}: {} maps, expected (2m-1) * {} = {expected}",
                top.len(),
                below.len()
            )));
        }
    }
    Ok(None)
}

fn positions_of(f: &ColorMap, color: Color) -> Vec<usize> {
    f.labels()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == color)
        .map(|(i, _)| i)
        .collect()
}

fn color_subset_factorization(config: &VerifyConfig) -> Outcome {
    for (m, n) in lemma_range() {
        let exact = enumerate_peakless(m, m, Method::Filter, &opts(config))?.len();
        let mut groups: BTreeMap<Vec<Color>, usize> = BTreeMap::new();
        for f in enumerate_peakless(m, n, Method::Filter, &opts(config))? {
            *groups.entry(f.colors()).or_default() += 1;
        }
        if BigUint::from(groups.len()) != binomial(n.into(), m.into()) {
            return Ok(Some(format!("m={m}, N={n}: {} color subsets used", groups.len())));
        }
        if let Some((subset, size)) = groups.iter().find(|(_, &size)| size != exact) {
            return Ok(Some(format!(
                "m={m}, N={n}: subset {subset:?} has {size} maps, expected {exact}"
            )));
        }
    }
    Ok(None)
}

fn top_color_adjacent(config: &VerifyConfig) -> Outcome {
    for (m, n) in lemma_range() {
        for f in enumerate_peakless(m, n, Method::Filter, &opts(config))? {
            let top = *f.labels().iter().max().expect("m >= 1");
            let at = positions_of(&f, top);
            if at[1] != at[0] + 1 {
                return Ok(Some(format!("{f} (N={n})")));
            }
        }
    }
    Ok(None)
}

fn peakless_iff_monotone(config: &VerifyConfig) -> Outcome {
    for (m, n) in small_range() {
        for f in enumerate_pair_maps(m, n, &opts(config))? {
            let flags = classify(&f);
            if flags.peakless != flags.monotone {
                return Ok(Some(format!("{f} (N={n}): {flags:?}")));
            }
        }
    }
    Ok(None)
}

fn contribution_dichotomy(config: &VerifyConfig) -> Outcome {
    let mu = MomentSequence::bernoulli(8);
    for (m, n) in small_range() {
        for f in enumerate_pair_maps(m, n, &opts(config))? {
            let w = pair_partition_weight(&f, &mu)?;
            let expected = if is_peakless(&f) {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            if w != expected {
                return Ok(Some(format!("{f} (N={n}): weight {w}")));
            }
        }
    }
    Ok(None)
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(
        BigInt::from(rng.random_range(-5i64..=5)),
        BigInt::from(rng.random_range(1i64..=4)),
    )
}

fn random_sequences(rng: &mut ChaCha8Rng, colors: usize, order: usize, centered: bool) -> Vec<MomentSequence> {
    (0..colors)
        .map(|_| {
            let mut moments = vec![BigRational::one()];
            moments.extend((1..=order).map(|k| {
                if k == 1 && centered {
                    BigRational::zero()
                } else {
                    random_rational(rng)
                }
            }));
            MomentSequence::new(moments).expect("mu_0 = 1")
        })
        .collect()
}

/// A random word of length 1..=8 over colors 1..=6 with a singleton planted
/// at a random position.
fn random_word_with_singleton(rng: &mut ChaCha8Rng) -> (Word, usize) {
    let len = rng.random_range(1..=8usize);
    let lone: Color = rng.random_range(1..=6);
    let s = rng.random_range(0..len);
    let colors = (0..len)
        .map(|i| {
            if i == s {
                return lone;
            }
            loop {
                let c = rng.random_range(1..=6);
                if c != lone {
                    break c;
                }
            }
        })
        .collect();
    (Word::new(colors).expect("positive colors"), s)
}

fn singleton_condition(config: &VerifyConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.random_words {
        let (word, s) = random_word_with_singleton(&mut rng);
        let moments = random_sequences(&mut rng, 6, 8, true);
        if !verify_singleton(&word, s, &moments)? {
            return Ok(Some(format!("{word}, position {s}")));
        }
        let value = reduce_monotone(&word, &moments)?;
        if !value.is_zero() {
            return Ok(Some(format!("{word}: centered moment is {value}, not 0")));
        }
    }
    Ok(None)
}

fn peak_choice_independence(config: &VerifyConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    for _ in 0..config.random_words {
        let len = rng.random_range(0..=8usize);
        let word = Word::new((0..len).map(|_| rng.random_range(1..=4)).collect()).expect("positive");
        let moments = random_sequences(&mut rng, 4, 8, false);
        let fixed = reduce_monotone(&word, &moments)?;
        let mut pick_rng = ChaCha8Rng::seed_from_u64(rng.random());
        let random = reduce_by_peaks(&word, &moments, |_, peaks| {
            peaks[pick_rng.random_range(0..peaks.len())]
        })?;
        if fixed != random {
            return Ok(Some(format!("{word}: leftmost-top {fixed}, random peak {random}")));
        }
    }
    Ok(None)
}

fn pattern_grouping_exact(config: &VerifyConfig) -> Outcome {
    let skewed = MomentSequence::new(
        ["1", "1/2", "2", "-1/3", "5", "0", "7/4"]
            .iter()
            .map(|s| monotone_clt::moments::parse_rational(s).expect("literal"))
            .collect(),
    )?;
    for mu in [MomentSequence::bernoulli(6), skewed] {
        for n in 1..=4 {
            for m in 0..=6 {
                let grouped = sum_moment(n, m, &mu)?;
                let direct = sum_moment_direct(n, m, &mu, config.cap)?;
                if grouped != direct {
                    return Ok(Some(format!("N={n}, m={m}: grouped {grouped}, direct {direct}")));
                }
            }
        }
    }
    Ok(None)
}

fn odd_moments_vanish(_: &VerifyConfig) -> Outcome {
    let mu = MomentSequence::bernoulli(7);
    for n in 1..=20 {
        for m in (1..=7).step_by(2) {
            let value = normalized_moment(n, m, &mu)?;
            if !value.is_zero() {
                return Ok(Some(format!("N={n}, m={m}: {value:?}")));
            }
        }
    }
    Ok(None)
}

fn monotone_error(n: u32, order: usize, mu: &MomentSequence) -> Result<BigRational> {
    let value = normalized_moment(n, order, mu)?;
    let value = value.exact().expect("even order is exact").clone();
    Ok(monotone_clt::moments::abs_diff(&value, &limit_moment(order, Independence::Monotone)))
}

fn clt_convergence(_: &VerifyConfig) -> Outcome {
    let mu = MomentSequence::bernoulli(8);
    let bound = BigRational::new(1.into(), 10.into());
    for order in [2, 4, 6, 8] {
        let errors = [5, 10, 20, 40]
            .iter()
            .map(|&n| monotone_error(n, order, &mu))
            .collect::<Result<Vec<_>>>()?;
        if errors.windows(2).any(|w| w[1] > w[0]) {
            return Ok(Some(format!("order {order}: errors {errors:?} increase")));
        }
        if errors[3] >= bound {
            return Ok(Some(format!("order {order}: error {} at N=40", errors[3])));
        }
    }
    Ok(None)
}

fn pair_sum_consistency(config: &VerifyConfig) -> Outcome {
    let mu = MomentSequence::bernoulli(6);
    for order in [4, 6] {
        let gap = |n: u32| -> Result<BigRational> {
            let value = normalized_moment(n, order, &mu)?.exact().expect("even").clone();
            let pairs = pair_partition_normalized_sum(n, order, &mu, PairSumMode::Grouped, &opts(config))?;
            Ok(monotone_clt::moments::abs_diff(&value, &pairs))
        };
        let (g10, g40) = (gap(10)?, gap(40)?);
        if g40 >= g10 {
            return Ok(Some(format!("order {order}: gap {g10} at N=10, {g40} at N=40")));
        }
    }
    Ok(None)
}

fn count_limit(config: &VerifyConfig) -> Outcome {
    let n = 1000u32;
    for m in 1..=6u32 {
        let count = (config.count_peakless)(m, n)?;
        let ratio = BigRational::new(count.into(), BigInt::from(n).pow(m));
        let limit = limit_moment(2 * m as usize, Independence::Monotone);
        let rel = ((&ratio - &limit) / &limit).to_f64().unwrap_or(f64::NAN).abs();
        let allowed = 2.0 * f64::from(m * m) / f64::from(n);
        if rel.is_nan() || rel > allowed {
            return Ok(Some(format!("m={m}: relative error {rel:e} above {allowed:e}")));
        }
    }
    Ok(None)
}

fn arcsine_quadrature(config: &VerifyConfig) -> Outcome {
    let spec = QuadratureSpec::with_tolerance(config.tolerance);
    for m in 0..=10 {
        let got = arcsine_moment_quadrature(m, &spec)?;
        let exact = arcsine_moment_closed(m).to_f64().expect("finite");
        if (got - exact).abs() > spec.tolerance {
            return Ok(Some(format!("m={m}: quadrature {got}, closed form {exact}")));
        }
        if m % 2 == 1 && got.abs() > 1e-12 {
            return Ok(Some(format!("m={m}: odd moment {got:e}")));
        }
    }
    let mass = arcsine_moment_quadrature(0, &spec)?;
    if (mass - 1.0).abs() > 1e-10 {
        return Ok(Some(format!("total mass {mass}")));
    }
    Ok(None)
}

fn arcsine_moments(_: &VerifyConfig) -> Outcome {
    for m in 0..=12usize {
        let closed = arcsine_moment_closed(m);
        if closed != limit_moment(m, Independence::Monotone) {
            return Ok(Some(format!("m={m}: arcsine {closed}")));
        }
        if m % 2 == 0 {
            let k = (m / 2) as u64;
            let ratio = BigRational::new(
                odd_double_factorial(k).into(),
                factorial(k).into(),
            );
            if closed != ratio {
                return Ok(Some(format!("m={m}: {closed} != (2k-1)!!/k!")));
            }
        }
    }
    let second = arcsine_moment_closed(2);
    let fourth = arcsine_moment_closed(4);
    if !second.is_one() || fourth != BigRational::new(3.into(), 2.into()) {
        return Ok(Some(format!("M2 = {second}, M4 = {fourth}")));
    }
    Ok(None)
}

fn four_class_limits(config: &VerifyConfig) -> Outcome {
    let expected = [("monotone", (3, 2)), ("commutative", (3, 1)), ("free", (2, 1)), ("boolean", (1, 1))];
    for (row, (name, (p, q))) in class_rows(4, config.cap)?.iter().zip(expected) {
        let want = BigRational::new(p.into(), q.into());
        if row.class.to_string() != name || row.from_count != want || row.limit != want {
            return Ok(Some(format!(
                "{}: counted {}, limit {}, expected {want}",
                row.class, row.from_count, row.limit
            )));
        }
    }
    Ok(None)
}
