use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use mclt::classes::class_rows;
use mclt::render::{format_float, format_rational};
use mclt::table::{build_table, OutputFormat, RunConfig};
use mclt::verify::{self, VerifyConfig};
use monotone_clt::arcsine::{arcsine_moment_closed, arcsine_moment_quadrature, QuadratureSpec};
use monotone_clt::combinatorics::{
    classify, count_peakless, enumerate_pair_maps, enumerate_peakless, paint_unrank, ColorMap,
    EnumOptions, Method, PaintRank, DEFAULT_CAP,
};
use monotone_clt::moments::{reduce_monotone, MomentSequence, Word};
use monotone_clt::Error;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "mclt", version, about = "Peakless pair partitions and monotone CLT moments")]
struct Cli {
    /// Largest instance an enumeration may materialize.
    #[arg(long, global = true, env = "MCLT_CAP", default_value_t = DEFAULT_CAP,
          value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,

    /// Quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = parse_tolerance)]
    tolerance: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Print every non-integer as p/q instead of a terminating decimal.
    #[arg(long, global = true)]
    rational: bool,

    /// JSON moment sequence shared by all variables (default: symmetric Bernoulli).
    #[arg(long, global = true, value_name = "PATH")]
    moments: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Filter,
    Paint,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Filter => Method::Filter,
            MethodArg::Paint => Method::Paint,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Number of peakless pair maps, C(N, m) (2m-1)!!.
    Count {
        #[arg(short = 'm', long)]
        pairs: u32,
        #[arg(short = 'N', long)]
        colors: u32,
        /// Also count by brute force and compare.
        #[arg(long)]
        check: bool,
    },
    /// List peakless pair maps (or all pair maps with --all).
    Enumerate {
        #[arg(short = 'm', long)]
        pairs: u32,
        #[arg(short = 'N', long)]
        colors: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Filter)]
        method: MethodArg,
        #[arg(long)]
        all: bool,
    },
    /// Run the painting construction for one rank.
    Paint {
        #[arg(short = 'm', long)]
        pairs: u32,
        #[arg(short = 'N', long)]
        colors: u32,
        #[arg(long, default_value = "0", value_parser = parse_biguint)]
        subset_index: BigUint,
        #[arg(long, value_delimiter = ',', required = true)]
        digits: Vec<u32>,
    },
    /// Reduce the mixed moment of a word under monotone independence.
    Moment {
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<u32>,
    },
    /// Finite-N CLT moments against the arcsine limit.
    Table {
        /// Moment orders m.
        #[arg(long = "order", value_delimiter = ',', required = true)]
        orders: Vec<usize>,
        /// Numbers of variables N.
        #[arg(short = 'N', long = "colors", value_delimiter = ',', required = true,
              value_parser = clap::value_parser!(u32).range(1..))]
        colors: Vec<u32>,
    },
    /// Pair-partition counts and limit moments for the four independences.
    Classes {
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Arcsine moments: closed form against quadrature.
    Arcsine {
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, default_value_t = VerifyConfig::default().seed)]
        seed: u64,
    },
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(format!("tolerance must be a positive number, got {s}"))
    }
}

fn parse_biguint(s: &str) -> Result<BigUint, String> {
    BigUint::from_str(s).map_err(|e| e.to_string())
}

/// Failure with its exit status: 1 for engine or verification failures,
/// 2 for bad arguments and malformed input files.
enum Failure {
    Usage(String),
    Engine(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::MomentFormat(_) => Failure::Usage(e.to_string()),
            other => Failure::Engine(other.to_string()),
        }
    }
}

type CmdResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => Cli::command().error(ErrorKind::ValueValidation, msg).exit(),
        Err(Failure::Engine(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    let opts = EnumOptions::with_cap(cli.cap);
    match &cli.command {
        Command::Count { pairs, colors, check } => cmd_count(cli, *pairs, *colors, *check, &opts),
        Command::Enumerate {
            pairs,
            colors,
            method,
            all,
        } => cmd_enumerate(cli, *pairs, *colors, (*method).into(), *all, &opts),
        Command::Paint {
            pairs,
            colors,
            subset_index,
            digits,
        } => {
            let rank = PaintRank {
                subset_index: subset_index.clone(),
                digits: digits.clone(),
            };
            let f = paint_unrank(*pairs, *colors, &rank)?;
            Ok(match cli.format {
                Format::Csv => format!("{f}\n"),
                Format::Json => format!("{}\n", json!({ "labels": f.labels() })),
            })
        }
        Command::Moment { word } => cmd_moment(cli, word),
        Command::Table { orders, colors } => cmd_table(cli, orders, colors),
        Command::Classes { order } => cmd_classes(cli, *order),
        Command::Arcsine { order } => cmd_arcsine(cli, *order),
        Command::Verify { seed } => {
            let config = VerifyConfig {
                cap: cli.cap,
                tolerance: cli.tolerance,
                seed: *seed,
                ..VerifyConfig::default()
            };
            let report = verify::run(&config);
            if report.passed() {
                Ok(report.render())
            } else {
                print!("{}", report.render());
                let (name, why) = report.first_failure().expect("a failure");
                Err(Failure::Engine(format!("property {name} failed: {why}")))
            }
        }
    }
}

fn load_moments(path: Option<&Path>, default_order: usize) -> Result<MomentSequence, Failure> {
    match path {
        None => Ok(MomentSequence::bernoulli(default_order)),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(MomentSequence::from_json(&text)?)
        }
    }
}

fn cmd_count(cli: &Cli, m: u32, n: u32, check: bool, opts: &EnumOptions) -> CmdResult {
    let count = count_peakless(m, n)?;
    let brute = if check {
        Some(BigUint::from(enumerate_peakless(m, n, Method::Filter, opts)?.len()))
    } else {
        None
    };
    let matched = brute.as_ref().is_none_or(|b| *b == count);
    let out = match cli.format {
        Format::Csv => match &brute {
            None => format!("{count}\n"),
            Some(b) => format!(
                "{count}\nbrute-force {b}\n{}\n",
                if matched { "match" } else { "mismatch" }
            ),
        },
        Format::Json => {
            let mut doc = json!({ "pairs": m, "colors": n, "count": count.to_string() });
            if let Some(b) = &brute {
                doc["brute_force"] = json!(b.to_string());
                doc["match"] = json!(matched);
            }
            format!("{doc}\n")
        }
    };
    if matched {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Engine(format!(
            "closed form {count} disagrees with brute force for m={m}, N={n}"
        )))
    }
}

fn cmd_enumerate(
    cli: &Cli,
    m: u32,
    n: u32,
    method: Method,
    all: bool,
    opts: &EnumOptions,
) -> CmdResult {
    let maps: Vec<ColorMap> = if all {
        enumerate_pair_maps(m, n, opts)?
    } else {
        enumerate_peakless(m, n, method, opts)?
    };
    Ok(match cli.format {
        Format::Csv => {
            let mut out = String::from("labels,peakless,noncrossing,interval,monotone\n");
            for f in &maps {
                let c = classify(f);
                let labels: Vec<String> = f.labels().iter().map(u32::to_string).collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    labels.join(" "),
                    c.peakless,
                    c.noncrossing,
                    c.interval,
                    c.monotone
                );
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = maps
                .iter()
                .map(|f| json!({ "labels": f.labels(), "classes": classify(f) }))
                .collect();
            let doc = json!({
                "pairs": m,
                "colors": n,
                "method": if all { "all".to_string() } else { method.to_string() },
                "count": maps.len(),
                "maps": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
    })
}

fn cmd_moment(cli: &Cli, colors: &[u32]) -> CmdResult {
    let word = Word::new(colors.to_vec())?;
    let mu = load_moments(cli.moments.as_deref(), word.len())?;
    let value = reduce_monotone(&word, &mu)?;
    let text = format_rational(&value, cli.rational);
    Ok(match cli.format {
        Format::Csv => format!("{text}\n"),
        Format::Json => format!("{}\n", json!({ "word": colors, "value": text })),
    })
}

fn cmd_table(cli: &Cli, orders: &[usize], colors: &[u32]) -> CmdResult {
    let max_order = orders.iter().copied().max().unwrap_or(0);
    let mu = load_moments(cli.moments.as_deref(), max_order)?;
    let config = RunConfig {
        moment_file: cli.moments.clone(),
        cap: cli.cap,
        tolerance: cli.tolerance,
        format: match cli.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
        rational: cli.rational,
    };
    Ok(build_table(orders, colors, &mu, &config)?.render())
}

fn cmd_classes(cli: &Cli, order: usize) -> CmdResult {
    let rows = class_rows(order, cli.cap)?;
    let fmt = |r| format_rational(r, cli.rational);
    let out = match cli.format {
        Format::Csv => {
            let mut out = String::from("class,colorings,from_count,limit\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    r.class,
                    r.colorings,
                    fmt(&r.from_count),
                    fmt(&r.limit)
                );
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "class": r.class,
                        "colorings": r.colorings.to_string(),
                        "from_count": fmt(&r.from_count),
                        "limit": fmt(&r.limit),
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&json!({ "order": order, "rows": rows })).expect("json"))
        }
    };
    if let Some(bad) = rows.iter().find(|r| r.from_count != r.limit) {
        print!("{out}");
        return Err(Failure::Engine(format!(
            "{}: counted {} but limit is {}",
            bad.class, bad.from_count, bad.limit
        )));
    }
    Ok(out)
}

fn cmd_arcsine(cli: &Cli, order: usize) -> CmdResult {
    let spec = QuadratureSpec::with_tolerance(cli.tolerance);
    let mut rows = Vec::new();
    for m in 0..=order {
        let closed = arcsine_moment_closed(m);
        let quad = arcsine_moment_quadrature(m, &spec)?;
        let err = (quad - closed.to_f64().unwrap_or(f64::NAN)).abs();
        rows.push((m, format_rational(&closed, cli.rational), quad, err));
    }
    let out = match cli.format {
        Format::Csv => {
            let mut out = String::from("m,closed,quadrature,abs_error\n");
            for (m, closed, quad, err) in &rows {
                let _ = writeln!(out, "{m},{closed},{},{}", format_float(*quad), format_float(*err));
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(m, closed, quad, err)| {
                    json!({ "m": m, "closed": closed, "quadrature": quad, "abs_error": err })
                })
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({ "tolerance": cli.tolerance, "rows": rows }))
                    .expect("json")
            )
        }
    };
    if let Some((m, _, _, err)) = rows.iter().find(|r| r.3 > spec.tolerance) {
        print!("{out}");
        return Err(Failure::Engine(format!(
            "quadrature misses the closed form at m={m} by {err:e}"
        )));
    }
    Ok(out)
}
