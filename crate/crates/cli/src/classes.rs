//! Pair-partition counts for the four basic independences.

use monotone_clt::combinatorics::{classify, enumerate_pair_maps, factorial, ClassFlags, EnumOptions};
use monotone_clt::moments::{limit_moment, Independence};
use monotone_clt::Result;
use num_bigint::BigUint;
use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRow {
    pub class: Independence,
    /// Pair maps on `k` colors (`order = 2k`) admitted by the class.
    pub colorings: BigUint,
    /// `colorings / k!`.
    pub from_count: BigRational,
    /// The closed-form limit moment.
    pub limit: BigRational,
}

pub fn admits(class: Independence, flags: &ClassFlags) -> bool {
    match class {
        Independence::Monotone => flags.monotone,
        Independence::Commutative => true,
        Independence::Free => flags.noncrossing,
        Independence::Boolean => flags.interval,
    }
}

/// Counts, for each class, the pair maps of `order` points onto exactly
/// `order / 2` colors that the class's partition predicate admits.
pub fn class_rows(order: usize, cap: u64) -> Result<Vec<ClassRow>> {
    let maps = if order % 2 == 1 {
        Vec::new()
    } else {
        let k = (order / 2) as u32;
        let opts = EnumOptions {
            cap,
            allow_empty: true,
        };
        enumerate_pair_maps(k, k, &opts)?
    };
    let flags: Vec<ClassFlags> = maps.iter().map(classify).collect();
    let k_factorial = factorial((order / 2) as u64);
    Ok(Independence::ALL
        .into_iter()
        .map(|class| {
            let colorings = BigUint::from(flags.iter().filter(|f| admits(class, f)).count());
            let from_count = BigRational::new(colorings.clone().into(), k_factorial.clone().into());
            ClassRow {
                class,
                colorings,
                from_count,
                limit: limit_moment(order, class),
            }
        })
        .collect())
}
