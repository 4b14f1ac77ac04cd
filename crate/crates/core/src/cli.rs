//! Command-line front end. [`run`] writes everything to the supplied
//! writer so the binary and the tests share one code path.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimators::{
    asymptotic_estimate, corrected_estimate, correction_factor, deleted_prime_estimate,
    survivor_estimate, ProductCutoff, RoundingMode,
};
use crate::experiments::{
    count_actual_twins_with, export_report, figure1_series, reproduce_table4, table4_csv, Boundary,
    CountingMode, TableConfig, TableReport, TABLE4_PRIMES,
};
use crate::primes::{is_prime_u64, PrimeTable};
use crate::wheel::{exact_deletion_ledger, TwinWheel, DEFAULT_WHEEL_CAP};

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "TWIN_SIEVE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "twin-sieve",
    version,
    about = "Double sieve for twin primes and twin-prime count estimates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the wheel L_P and optionally print its table with the next step's deletions.
    Wheel {
        #[arg(long, value_name = "P")]
        max_level: u64,
        #[arg(long)]
        print_table: bool,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
        /// Highest level that may be materialised.
        #[arg(long, default_value_t = DEFAULT_WHEEL_CAP)]
        wheel_cap: u64,
    },
    /// Count twin primes in [P, P²].
    Count {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        counting: CountingArgs,
    },
    /// Print one estimate for the twin primes in [P, P²].
    Estimate {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        method: Method,
        /// Last prime of the twin-prime product for eq16 (defaults to P).
        #[arg(long)]
        product_bound: Option<u64>,
        #[command(flatten)]
        estimate: EstimateArgs,
        #[arg(long, value_enum, default_value_t = CountingArg::Individual)]
        counting: CountingArg,
    },
    /// Reproduce the comparison table and write table4.csv.
    Table {
        #[command(flatten)]
        table: TableArgs,
    },
    /// Write the percent-difference series eq7.dat and eq15.dat.
    Figure {
        #[command(flatten)]
        table: TableArgs,
    },
    /// Exact deleted-prime counts per sieving step against their estimates.
    Ledger {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct CountingArgs {
    #[arg(long, value_enum, default_value_t = CountingArg::Individual)]
    pub counting: CountingArg,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Touching)]
    pub boundary: BoundaryArg,
}

#[derive(Debug, Clone, clap::Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum, default_value_t = CutoffArg::ThroughNextPrime)]
    pub product_cutoff: CutoffArg,
    #[arg(long, value_enum, default_value_t = RoundingArg::HalfAway)]
    pub rounding: RoundingArg,
}

#[derive(Debug, Clone, clap::Args)]
pub struct TableArgs {
    /// Comma-separated primes (defaults to the seventeen reference ones).
    #[arg(long, value_delimiter = ',')]
    pub primes: Vec<u64>,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub estimate: EstimateArgs,
    #[command(flatten)]
    pub counting: CountingArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Eq7,
    Eq15,
    Eq16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountingArg {
    Individual,
    Pairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    /// Members of twin pairs with at least one member in [P, P²].
    Touching,
    /// Twin primes inside [P, P²] only.
    Inside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CutoffArg {
    ThroughP,
    ThroughNextPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoundingArg {
    HalfAway,
    Truncate,
}

impl From<CountingArg> for CountingMode {
    fn from(a: CountingArg) -> Self {
        match a {
            CountingArg::Individual => CountingMode::Individual,
            CountingArg::Pairs => CountingMode::Pairs,
        }
    }
}

impl From<BoundaryArg> for Boundary {
    fn from(a: BoundaryArg) -> Self {
        match a {
            BoundaryArg::Touching => Boundary::PairsTouchingRange,
            BoundaryArg::Inside => Boundary::MembersInRange,
        }
    }
}

impl From<CutoffArg> for ProductCutoff {
    fn from(a: CutoffArg) -> Self {
        match a {
            CutoffArg::ThroughP => ProductCutoff::ThroughP,
            CutoffArg::ThroughNextPrime => ProductCutoff::ThroughNextPrime,
        }
    }
}

impl From<RoundingArg> for RoundingMode {
    fn from(a: RoundingArg) -> Self {
        match a {
            RoundingArg::HalfAway => RoundingMode::HalfAwayFromZero,
            RoundingArg::Truncate => RoundingMode::Truncate,
        }
    }
}

impl TableArgs {
    fn config(&self) -> TableConfig {
        TableConfig {
            rounding: self.estimate.rounding.into(),
            cutoff: self.estimate.product_cutoff.into(),
            boundary: self.counting.boundary.into(),
            counting: self.counting.counting.into(),
        }
    }

    fn primes(&self) -> Vec<u64> {
        if self.primes.is_empty() {
            TABLE4_PRIMES.to_vec()
        } else {
            self.primes.clone()
        }
    }
}

fn require_level(p: u64) -> Result<()> {
    if p >= 5 && is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::Argument(format!("--p must be a prime ≥ 5, got {p}")))
    }
}

fn table_for_level(p: u64) -> Result<PrimeTable> {
    let limit = p
        .checked_mul(p)
        .and_then(|x| x.checked_add(2))
        .ok_or_else(|| Error::range("p", p, "p² overflows"))?;
    PrimeTable::new(limit)
}

fn io(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

/// Executes one parsed command.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Wheel {
            max_level,
            print_table,
            format,
            wheel_cap,
        } => run_wheel(*max_level, *print_table, *format, *wheel_cap, out),
        Command::Count { p, counting } => {
            require_level(*p)?;
            let table = table_for_level(*p)?;
            let n = count_actual_twins_with(
                *p,
                &table,
                counting.boundary.into(),
                counting.counting.into(),
            )?;
            writeln!(out, "{n}").map_err(io)
        }
        Command::Estimate {
            p,
            method,
            product_bound,
            estimate,
            counting,
        } => run_estimate(*p, *method, *product_bound, estimate, *counting, out),
        Command::Table { table } => {
            let report = reproduce_table4(&table.primes(), table.config())?;
            print_table(&report, out)?;
            let path = table.out_dir.join("table4.csv");
            std::fs::create_dir_all(&table.out_dir).map_err(|e| Error::io(&table.out_dir, e))?;
            std::fs::write(&path, table4_csv(&report)).map_err(|e| Error::io(&path, e))?;
            writeln!(out, "wrote {}", path.display()).map_err(io)
        }
        Command::Figure { table } => {
            let report = reproduce_table4(&table.primes(), table.config())?;
            let series = figure1_series(&report)?;
            let manifest = export_report(&report, &series, &table.out_dir)?;
            for (name, s) in [("eq7", &series.0), ("eq15", &series.1)] {
                for &(p, d) in &s.points {
                    writeln!(out, "{name} {p} {d:+.6}%").map_err(io)?;
                }
            }
            for f in manifest.files {
                writeln!(out, "wrote {}", f.display()).map_err(io)?;
            }
            Ok(())
        }
        Command::Ledger { p } => run_ledger(*p, out),
    }
}

fn run_wheel(
    level: u64,
    print: bool,
    format: TableFormat,
    cap: u64,
    out: &mut dyn Write,
) -> Result<()> {
    if cap < 5 {
        return Err(Error::Argument(format!(
            "--wheel-cap must be at least 5, got {cap}"
        )));
    }
    if level > cap {
        return Err(Error::Resource { level, cap });
    }
    let wheel = TwinWheel::at_level(level, cap)?;
    let (num, den) = wheel.density();
    writeln!(
        out,
        "level {}  period {}  columns {}  entries {}  density {num}/{den}",
        wheel.level(),
        wheel.period(),
        wheel.column_count(),
        wheel.residues().len()
    )
    .map_err(io)?;
    if print {
        let body = match format {
            TableFormat::Text => wheel.render_text(),
            TableFormat::Csv => wheel.render_csv(),
        };
        out.write_all(body.as_bytes()).map_err(io)?;
        if format == TableFormat::Text {
            writeln!(
                out,
                "* multiple of {0}   ' twin of a multiple of {0}   ({1} deleted)",
                wheel.level(),
                wheel.deletions().len()
            )
            .map_err(io)?;
        }
    }
    Ok(())
}

fn run_estimate(
    p: u64,
    method: Method,
    product_bound: Option<u64>,
    args: &EstimateArgs,
    counting: CountingArg,
    out: &mut dyn Write,
) -> Result<()> {
    require_level(p)?;
    let table = table_for_level(p)?;
    let x = p * p;
    let pi = table.count_primes_up_to(x)?;
    let cutoff: ProductCutoff = args.product_cutoff.into();
    let rounding: RoundingMode = args.rounding.into();
    let scale = match counting {
        CountingArg::Individual => 1.0,
        CountingArg::Pairs => 0.5,
    };
    writeln!(out, "p = {p}\nx = p^2 = {x}\npi(x) = {pi}").map_err(io)?;
    let value = match method {
        Method::Eq7 => survivor_estimate(p, pi)?,
        Method::Eq15 => {
            let r = correction_factor(p, pi, cutoff)?;
            writeln!(out, "r = {r:.10} ({r:.5})  cutoff = {cutoff:?}").map_err(io)?;
            corrected_estimate(p, pi, cutoff)?
        }
        Method::Eq16 => {
            let bound = product_bound.unwrap_or(p);
            writeln!(out, "product bound = {bound}").map_err(io)?;
            asymptotic_estimate(x as f64, bound)?
        }
    } * scale;
    writeln!(
        out,
        "{} = {value:.6}  rounded = {}",
        match method {
            Method::Eq7 => "eq7",
            Method::Eq15 => "eq15",
            Method::Eq16 => "eq16",
        },
        rounding.apply(value)
    )
    .map_err(io)
}

fn print_table(report: &TableReport, out: &mut dyn Write) -> Result<()> {
    let mode = report.metadata.config.rounding;
    writeln!(
        out,
        "{:>6} {:>8} {:>15} {:>8} {:>8} {:>15} {:>8}",
        "p", "actual", "eq7", "rounded", "r", "eq15", "rounded"
    )
    .map_err(io)?;
    for r in &report.rows {
        writeln!(
            out,
            "{:>6} {:>8} {:>15.6} {:>8} {:>8} {:>15.6} {:>8}   r = {:.10}",
            r.p,
            r.actual,
            r.survivor,
            r.survivor_rounded(mode),
            r.r_display(),
            r.corrected,
            r.corrected_rounded(mode),
            r.r
        )
        .map_err(io)?;
    }
    Ok(())
}

fn run_ledger(p: u64, out: &mut dyn Write) -> Result<()> {
    require_level(p)?;
    let table = table_for_level(p)?;
    let ledger = exact_deletion_ledger(p, &table)?;
    let pi = table.count_primes_up_to(p * p)?;
    writeln!(out, "p = {p}  bound = {}  pi(p^2) = {pi}", ledger.bound).map_err(io)?;
    writeln!(
        out,
        "{:>6} {:>10} {:>14} {:>9}",
        "step", "exact", "estimate", "rel.err"
    )
    .map_err(io)?;
    for &(step, exact) in &ledger.steps {
        let est = deleted_prime_estimate(p, step, pi)?;
        let rel = if exact == 0 {
            f64::NAN
        } else {
            (exact as f64 - est) / est
        };
        writeln!(out, "{step:>6} {exact:>10} {est:>14.4} {rel:>+9.4}").map_err(io)?;
    }
    let surv_est = survivor_estimate(p, pi)?;
    writeln!(
        out,
        "deleted {}  survivors {}  (eq7 estimate {surv_est:.4})  pi(p^2) - 2 = {}",
        ledger.total_deleted(),
        ledger.survivors,
        pi - 2
    )
    .map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("twin-sieve").chain(args.iter().copied()))
            .map_err(|e| Error::Argument(e.to_string()))?;
        let mut buf = Vec::new();
        run(&cli, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn wheel_table_seven() {
        let s = run_args(&["wheel", "--max-level", "7", "--print-table"]).unwrap();
        assert!(s.contains("period 210"));
        assert!(s.contains("(12 deleted)"), "{s}");
        assert!(s.contains("211"));
    }

    #[test]
    fn wheel_cap_violation() {
        let err = run_args(&["wheel", "--max-level", "29"]).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
        assert!(run_args(&["wheel", "--max-level", "7", "--wheel-cap", "3"]).is_err());
    }

    #[test]
    fn estimate_eq15_at_101() {
        let s = run_args(&["estimate", "--p", "101", "--method", "eq15"]).unwrap();
        assert!(s.contains("rounded = 410"), "{s}");
        assert!(s.contains("pi(x) = 1252"));
    }

    #[test]
    fn composite_p_is_rejected() {
        assert!(matches!(
            run_args(&["count", "--p", "91"]),
            Err(Error::Argument(_))
        ));
        assert!(run_args(&["estimate", "--p", "9", "--method", "eq7"]).is_err());
        assert!(run_args(&["ledger", "--p", "4"]).is_err());
    }

    #[test]
    fn unknown_flag_is_an_error() {
        assert!(run_args(&["count", "--q", "5"]).is_err());
    }

    #[test]
    fn count_at_101() {
        assert_eq!(run_args(&["count", "--p", "101"]).unwrap().trim(), "404");
    }

    #[test]
    fn ledger_output() {
        let s = run_args(&["ledger", "--p", "11"]).unwrap();
        assert!(s.contains("pi(p^2) - 2 = 28"), "{s}");
    }
}
