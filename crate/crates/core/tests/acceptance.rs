//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use monotone_clt::arcsine::{arcsine_moment_closed, arcsine_moment_quadrature, QuadratureSpec};
use monotone_clt::combinatorics::{
    binomial, classify, enumerate_pair_maps, enumerate_peakless, is_peakless,
    odd_double_factorial, paint_ranks, paint_unrank, ColorMap, EnumOptions, Method,
};
use monotone_clt::moments::{
    abs_diff, limit_moment, normalized_moment, pair_partition_normalized_sum,
    pair_partition_weight, reduce_monotone, sum_moment_direct, verify_singleton, Independence,
    MomentSequence, NormalizedMoment, PairSumMode, Word,
};
use monotone_clt::{BigRational, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn lemma_range() -> impl Iterator<Item = (u32, u32)> {
    (1..=4).flat_map(|m| (m..=6).map(move |n| (m, n)))
}

fn small_range() -> impl Iterator<Item = (u32, u32)> {
    (1..=4).flat_map(|m| (m..=5).map(move |n| (m, n)))
}

fn lemma_counts() -> Check {
    let start = Instant::now();
    let opts = EnumOptions::default();
    for (m, n) in lemma_range() {
        let filter = enumerate_peakless(m, n, Method::Filter, &opts).map_err(|e| e.to_string())?;
        let paint = enumerate_peakless(m, n, Method::Paint, &opts).map_err(|e| e.to_string())?;
        let formula = binomial(n.into(), m.into()) * odd_double_factorial(m.into());
        if BigUint::from(filter.len()) != formula || paint.len() != filter.len() {
            return Err(format!(
                "m={m}, N={n}: filter {}, paint {}, formula {formula}",
                filter.len(),
                paint.len()
            ));
        }
        if (m, n) == (2, 3) && filter.len() != 9 || (m, n) == (4, 6) && filter.len() != 1575 {
            return Err(format!("m={m}, N={n}: {} maps", filter.len()));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(10) {
        return Err(format!("took {elapsed:?}, limit 10 s"));
    }
    Ok(format!("(2,3) -> 9, (4,6) -> 1575, all 18 instances agree in {elapsed:.2?}"))
}

fn painting_bijection() -> Check {
    let opts = EnumOptions::default();
    let mut total = 0;
    for (m, n) in lemma_range() {
        let filtered: BTreeSet<ColorMap> = enumerate_peakless(m, n, Method::Filter, &opts)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        let mut image = BTreeSet::new();
        for rank in paint_ranks(m, n) {
            let f = paint_unrank(m, n, &rank).map_err(|e| e.to_string())?;
            if !image.insert(f.clone()) {
                return Err(format!("m={m}, N={n}: {f} reached twice"));
            }
        }
        if image != filtered {
            return Err(format!("m={m}, N={n}: image differs from filter enumeration"));
        }
        total += image.len();
    }
    Ok(format!("{total} ranks, injective, image equals filter set"))
}

fn contribution_dichotomy() -> Check {
    let mu = MomentSequence::bernoulli(8);
    let mut maps = 0;
    for (m, n) in small_range() {
        for f in enumerate_pair_maps(m, n, &EnumOptions::default()).map_err(|e| e.to_string())? {
            let w = pair_partition_weight(&f, &mu).map_err(|e| e.to_string())?;
            let expected = if is_peakless(&f) {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            if w != expected {
                return Err(format!("{f} (N={n}): weight {w}"));
            }
            maps += 1;
        }
    }
    Ok(format!("{maps} pair maps, weight 1 exactly on peakless"))
}

fn exact_normalized(n: u32, order: usize, mu: &MomentSequence) -> Result<BigRational, String> {
    match normalized_moment(n, order, mu).map_err(|e| e.to_string())? {
        NormalizedMoment::Exact(v) => Ok(v),
        other => Err(format!("order {order}: expected an exact value, got {other:?}")),
    }
}

fn monotone_clt_moments() -> Check {
    let start = Instant::now();
    let mu = MomentSequence::bernoulli(8);
    // Closed form for the fourth moment, first against the direct word sum.
    for n in 1..=6u32 {
        let direct = sum_moment_direct(n, 4, &mu, 1 << 20).map_err(|e| e.to_string())?;
        let closed = q(3 * i64::from(n) * (i64::from(n) - 1), 2) + q(n.into(), 1);
        if direct != closed {
            return Err(format!("N={n}: word sum {direct}, closed form {closed}"));
        }
    }
    for n in 1..=50u32 {
        let got = exact_normalized(n, 4, &mu)?;
        let want = q(3, 2) - q(1, 2 * i64::from(n));
        if got != want {
            return Err(format!("N={n}: fourth moment {got}, expected {want}"));
        }
    }
    let bound = q(1, 10);
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for order in [2usize, 4, 6, 8] {
        let limit = limit_moment(order, Independence::Monotone);
        let k = (order / 2) as u64;
        let arcsine = BigRational::new(
            odd_double_factorial(k).into(),
            monotone_clt::combinatorics::factorial(k).into(),
        );
        if limit != arcsine {
            return Err(format!("order {order}: limit {limit} != (2m-1)!!/m!"));
        }
        let err10 = abs_diff(&exact_normalized(10, order, &mu)?, &limit);
        let err40 = abs_diff(&exact_normalized(40, order, &mu)?, &limit);
        let e40 = err40.to_f64().unwrap_or(f64::NAN);
        summary.push(format!("2m={order}: err(40)={e40:.4}"));
        if err40 >= bound {
            failures.push(format!("2m={order}: error {err40} = {e40:.4} at N=40 is not below 0.1"));
        }
        if err40 >= err10 {
            failures.push(format!("2m={order}: error at N=40 not below N=10"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        failures.push(format!("took {elapsed:?}, limit 60 s"));
    }
    if failures.is_empty() {
        Ok(format!("{} in {elapsed:.2?}", summary.join(", ")))
    } else {
        Err(failures.join("; "))
    }
}

fn odd_moments() -> Check {
    let mu = MomentSequence::bernoulli(7);
    for n in 1..=20 {
        for m in [1, 3, 5, 7] {
            let v = normalized_moment(n, m, &mu).map_err(|e| e.to_string())?;
            if !v.is_zero() {
                return Err(format!("N={n}, m={m}: {v:?}"));
            }
        }
    }
    Ok("all odd m <= 7, N <= 20 vanish".into())
}

fn pair_sum_consistency() -> Check {
    let mu = MomentSequence::bernoulli(6);
    let opts = EnumOptions::default();
    let mut notes = Vec::new();
    for order in [4usize, 6] {
        let gap = |n: u32, mode| -> Result<BigRational, String> {
            let pairs = pair_partition_normalized_sum(n, order, &mu, mode, &opts)
                .map_err(|e| e.to_string())?;
            Ok(abs_diff(&exact_normalized(n, order, &mu)?, &pairs))
        };
        // Enumerating all of Pi at N = 10 cross-checks the grouped pair sum.
        let g10 = gap(10, PairSumMode::Enumerate)?;
        if g10 != gap(10, PairSumMode::Grouped)? {
            return Err(format!("order {order}: pair-sum modes disagree at N=10"));
        }
        let g40 = gap(40, PairSumMode::Grouped)?;
        if g40 >= g10 {
            return Err(format!("order {order}: gap {g10} at N=10, {g40} at N=40"));
        }
        if order == 4 && (g10 != q(1, 10) || g40 != q(1, 40)) {
            return Err(format!("order 4: gaps {g10}, {g40}, expected 1/N"));
        }
        notes.push(format!("2m={order}: {g10} -> {g40}"));
    }
    Ok(notes.join(", "))
}

fn singleton_condition() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_101);
    for i in 0..200 {
        let len = rng.random_range(1..=8usize);
        let s = rng.random_range(0..len);
        let colors: Vec<u32> = (0..len)
            .map(|j| if j == s { 7 } else { rng.random_range(1..=6) })
            .collect();
        let word = Word::new(colors).map_err(|e| e.to_string())?;
        let moments: Vec<MomentSequence> = (0..7)
            .map(|_| {
                let mut mu = vec![BigRational::one(), BigRational::zero()];
                mu.extend((2..=8).map(|_| q(rng.random_range(-4..=4), rng.random_range(1..=3))));
                MomentSequence::new(mu).expect("unital")
            })
            .collect();
        let holds = verify_singleton(&word, s, &moments).map_err(|e| e.to_string())?;
        let value = reduce_monotone(&word, &moments).map_err(|e| e.to_string())?;
        if !holds || !value.is_zero() {
            return Err(format!("word #{i} {word}, singleton at {s}: moment {value}"));
        }
    }
    Ok("200 random words factorize and reduce to 0".into())
}

fn remark_equivalence() -> Check {
    let mut maps = 0;
    for (m, n) in small_range() {
        for f in enumerate_pair_maps(m, n, &EnumOptions::default()).map_err(|e| e.to_string())? {
            let flags = classify(&f);
            if flags.peakless != flags.monotone {
                return Err(format!("{f} (N={n}): {flags:?}"));
            }
            maps += 1;
        }
    }
    Ok(format!("{maps} pair maps, peakless iff monotone"))
}

fn arcsine_integral() -> Check {
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for m in 0..=12usize {
        let got = arcsine_moment_quadrature(m, &spec).map_err(|e| e.to_string())?;
        if m % 2 == 0 {
            let k = (m / 2) as u64;
            let exact = (BigRational::new(
                odd_double_factorial(k).into(),
                monotone_clt::combinatorics::factorial(k).into(),
            ))
            .to_f64()
            .expect("finite");
            if arcsine_moment_closed(m).to_f64() != Some(exact) {
                return Err(format!("m={m}: closed form disagrees with (2k-1)!!/k!"));
            }
            let err = (got - exact).abs();
            worst = worst.max(err);
            if err > 1e-8 {
                return Err(format!("m={m}: quadrature {got}, exact {exact}"));
            }
        } else if got.abs() > 1e-12 {
            return Err(format!("m={m}: odd moment {got:e}"));
        }
    }
    let mass = arcsine_moment_quadrature(0, &spec).map_err(|e| e.to_string())?;
    if (mass - 1.0).abs() > 1e-10 {
        return Err(format!("total mass {mass}"));
    }
    Ok(format!("worst even-moment error {worst:.1e}"))
}

fn four_class_limits() -> Check {
    let maps = enumerate_pair_maps(2, 2, &EnumOptions::default()).map_err(|e| e.to_string())?;
    let flags: Vec<_> = maps.iter().map(classify).collect();
    let count = |pred: fn(&monotone_clt::combinatorics::ClassFlags) -> bool| {
        // Two colors on four points: divide the colored count by 2!.
        q(flags.iter().filter(|f| pred(f)).count() as i64, 2)
    };
    let cases = [
        (Independence::Monotone, count(|f| f.monotone), q(3, 2)),
        (Independence::Commutative, count(|_| true), q(3, 1)),
        (Independence::Free, count(|f| f.noncrossing), q(2, 1)),
        (Independence::Boolean, count(|f| f.interval), q(1, 1)),
    ];
    for (class, counted, expected) in &cases {
        let limit = limit_moment(4, *class);
        if counted != expected || &limit != expected {
            return Err(format!("{class}: counted {counted}, limit {limit}, expected {expected}"));
        }
    }
    Ok("monotone 3/2, commutative 3, free 2, boolean 1".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("lemma counts", lemma_counts),
        ("painting bijection", painting_bijection),
        ("contribution dichotomy", contribution_dichotomy),
        ("monotone CLT moments", monotone_clt_moments),
        ("odd moments vanish", odd_moments),
        ("pair-partition sum consistency", pair_sum_consistency),
        ("singleton condition", singleton_condition),
        ("peakless iff monotone partition", remark_equivalence),
        ("arcsine integral", arcsine_integral),
        ("four-class limit moments", four_class_limits),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
