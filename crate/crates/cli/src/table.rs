//! CLT convergence tables.

use std::fmt::Write as _;
use std::path::PathBuf;

use monotone_clt::combinatorics::EnumOptions;
use monotone_clt::moments::{
    abs_diff, limit_moment, normalized_moment, pair_partition_normalized_sum, Independence,
    MomentSequence, NormalizedMoment, PairSumMode,
};
use monotone_clt::Result;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::render::{format_float, format_rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub moment_file: Option<PathBuf>,
    pub cap: u64,
    pub tolerance: f64,
    pub format: OutputFormat,
    pub rational: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            moment_file: None,
            cap: monotone_clt::combinatorics::DEFAULT_CAP,
            tolerance: 1e-10,
            format: OutputFormat::Csv,
            rational: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub m: usize,
    pub normalized: String,
    pub pair_sum: String,
    pub limit: String,
    pub abs_error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub config: RunConfig,
    pub rows: Vec<ConvergenceRow>,
}

pub const CSV_HEADER: &str = "N,m,normalized,pair_sum,limit,abs_error";

/// `N^{-m/2} * sum over pair maps`, extended by its natural values where
/// the pair-partition set is trivial: the empty partition for `m = 0`, and
/// no pair maps for odd `m` or for more pairs than colors.
fn pair_sum_cell(n: u32, m: usize, mu: &MomentSequence, cap: u64) -> Result<BigRational> {
    if m == 0 {
        return Ok(BigRational::one());
    }
    if m % 2 == 1 || m / 2 > n as usize {
        return Ok(BigRational::zero());
    }
    pair_partition_normalized_sum(n, m, mu, PairSumMode::Grouped, &EnumOptions::with_cap(cap))
}

pub fn convergence_row(
    n: u32,
    m: usize,
    mu: &MomentSequence,
    config: &RunConfig,
) -> Result<ConvergenceRow> {
    let normalized = normalized_moment(n, m, mu)?;
    let pair_sum = pair_sum_cell(n, m, mu, config.cap)?;
    let limit = limit_moment(m, Independence::Monotone);
    let fmt = |r: &BigRational| format_rational(r, config.rational);
    let (normalized_text, error_text) = match &normalized {
        NormalizedMoment::Exact(value) => (fmt(value), fmt(&abs_diff(value, &limit))),
        NormalizedMoment::Approximate(x) => {
            let err = (x - limit.to_f64().unwrap_or(f64::NAN)).abs();
            (format_float(*x), format_float(err))
        }
    };
    Ok(ConvergenceRow {
        n,
        m,
        normalized: normalized_text,
        pair_sum: fmt(&pair_sum),
        limit: fmt(&limit),
        abs_error: error_text,
    })
}

/// One row per `(N, m)`, colors outermost, both in the order given.
pub fn build_table(
    orders: &[usize],
    colors: &[u32],
    mu: &MomentSequence,
    config: &RunConfig,
) -> Result<TableReport> {
    let rows = colors
        .iter()
        .flat_map(|&n| orders.iter().map(move |&m| (n, m)))
        .map(|(n, m)| convergence_row(n, m, mu, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(TableReport {
        config: config.clone(),
        rows,
    })
}

impl TableReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.n, r.m, r.normalized, r.pair_sum, r.limit, r.abs_error
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn render(&self) -> String {
        match self.config.format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_for_known_cases() {
        let mu = MomentSequence::bernoulli(4);
        let config = RunConfig::default();
        let row = convergence_row(10, 4, &mu, &config).unwrap();
        assert_eq!(row.normalized, "1.45");
        assert_eq!(row.limit, "1.5");
        assert_eq!(row.abs_error, "0.05");
        assert_eq!(row.pair_sum, "1.35");

        for n in [1, 3, 17] {
            let row = convergence_row(n, 2, &mu, &config).unwrap();
            assert_eq!((row.normalized.as_str(), row.abs_error.as_str()), ("1", "0"));
        }

        let row = convergence_row(10, 3, &mu, &config).unwrap();
        assert_eq!((row.normalized.as_str(), row.limit.as_str()), ("0", "0"));
        assert_eq!(row.pair_sum, "0");

        let row = convergence_row(1, 4, &mu, &config).unwrap();
        assert_eq!(row.pair_sum, "0");
    }

    #[test]
    fn csv_layout() {
        let mu = MomentSequence::bernoulli(4);
        let report = build_table(&[2, 4], &[10], &mu, &RunConfig::default()).unwrap();
        assert_eq!(
            report.to_csv(),
            "N,m,normalized,pair_sum,limit,abs_error\n10,2,1,1,1,0\n10,4,1.45,1.35,1.5,0.05\n"
        );
    }

    #[test]
    fn json_round_trips() {
        let mu = MomentSequence::bernoulli(6);
        let config = RunConfig {
            format: OutputFormat::Json,
            rational: true,
            ..RunConfig::default()
        };
        let report = build_table(&[3, 4, 6], &[3, 7], &mu, &config).unwrap();
        let text = report.to_json();
        let parsed: TableReport = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.to_json(), text);
        let keys: Vec<_> = ["\"N\"", "\"m\"", "\"normalized\"", "\"pair_sum\"", "\"limit\"", "\"abs_error\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn insufficient_moments_surface() {
        let mu = MomentSequence::bernoulli(2);
        assert!(build_table(&[4], &[5], &mu, &RunConfig::default()).is_err());
    }
}
