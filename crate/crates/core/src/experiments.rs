//! Reproduction harness for the comparison table and its percent-difference
//! plot data.
//!
//! The "actual" column is an exact count from a [`PrimeTable`]; the
//! estimate columns come from [`crate::estimators`]. Exports are plain text
//! and a pure function of the report rows, so two runs produce identical
//! files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{EstimateRow, ProductCutoff, RoundingMode};
use crate::primes::{is_prime_u64, PrimeTable};
use crate::wheel::TwinWheel;

/// The seventeen primes of the reference comparison table.
pub const TABLE4_PRIMES: [u64; 17] = [
    101, 199, 307, 401, 503, 601, 701, 797, 907, 1009, 1999, 3001, 4001, 5003, 6007, 7001, 8009,
];

/// One row of the reference table, as printed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub p: u64,
    pub actual: u64,
    pub survivor: i64,
    pub r: f64,
    pub corrected: i64,
}

const fn row(p: u64, actual: u64, survivor: i64, r: f64, corrected: i64) -> ReferenceRow {
    ReferenceRow {
        p,
        actual,
        survivor,
        r,
        corrected,
    }
}

/// The reference table, transcribed verbatim (including its misprints).
pub const REFERENCE_TABLE4: [ReferenceRow; 17] = [
    row(101, 404, 394, 1.03975, 410),
    row(199, 1150, 1143, 1.01694, 1162),
    row(307, 2288, 2332, 0.99588, 2323),
    row(401, 3578, 3618, 0.99050, 3683),
    row(503, 5170, 5263, 0.98667, 5193),
    row(601, 6974, 7103, 0.98036, 6964),
    row(701, 8946, 9186, 0.97882, 8992),
    row(797, 11128, 11426, 0.97493, 11140),
    row(907, 13674, 14223, 0.97287, 13837),
    row(1009, 16556, 17053, 0.97038, 16548),
    row(1999, 53556, 55038, 0.96144, 52916),
    row(3001, 107610, 111342, 0.95734, 106592),
    row(4001, 176914, 184081, 0.95390, 175595),
    row(5003, 261086, 272412, 0.95202, 259343),
    row(6007, 358978, 375972, 0.95005, 357192),
    row(7001, 469528, 492326, 0.94945, 467437),
    row(8009, 594636, 625062, 0.94773, 592388),
];

/// Whether the count reports individual twin primes or twin pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountingMode {
    #[default]
    Individual,
    Pairs,
}

/// Which twin primes belong to the interval `[p, p²]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Every member of a twin pair with at least one member in the
    /// interval. Differs from [`Boundary::MembersInRange`] only when `p − 2`
    /// is prime, in which case `p − 2` is counted as well. This is the
    /// convention the reference counts follow.
    #[default]
    PairsTouchingRange,
    /// Only primes inside the interval that have a prime at distance 2.
    MembersInRange,
}

/// Options for [`build_table4`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TableConfig {
    pub rounding: RoundingMode,
    pub cutoff: ProductCutoff,
    pub boundary: Boundary,
    pub counting: CountingMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportMetadata {
    /// Seconds since the Unix epoch. Never written into the exports.
    pub generated_unix: u64,
    pub sieve_limit: u64,
    pub config: TableConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub rows: Vec<EstimateRow>,
    pub metadata: ReportMetadata,
}

/// Signed percent difference from the actual count, one point per prime.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSeries {
    pub label: String,
    pub points: Vec<(u64, f64)>,
}

/// Files written by [`export_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub files: Vec<PathBuf>,
}

fn is_twin_member(table: &PrimeTable, q: u64) -> bool {
    q >= 5 && table.is_prime(q) && (table.is_prime(q - 2) || table.is_prime(q + 2))
}

/// Twin primes counted over `[lo, hi]` under a boundary convention.
pub fn count_twins_between(
    lo: u64,
    hi: u64,
    table: &PrimeTable,
    boundary: Boundary,
    mode: CountingMode,
) -> Result<u64> {
    if hi.saturating_add(2) > table.limit() {
        return Err(Error::range(
            "interval end",
            hi,
            format!(
                "needs a prime table through {}, have {}",
                hi + 2,
                table.limit()
            ),
        ));
    }
    let lo = lo.max(5);
    if lo > hi {
        return Ok(0);
    }
    match mode {
        CountingMode::Individual => {
            let mut n = table
                .primes_between(lo, hi)
                .filter(|&q| is_twin_member(table, q))
                .count() as u64;
            if boundary == Boundary::PairsTouchingRange {
                if lo >= 7 && table.is_prime(lo - 2) && table.is_prime(lo) {
                    n += 1;
                }
                if table.is_prime(hi) && table.is_prime(hi + 2) {
                    n += 1;
                }
            }
            Ok(n)
        }
        CountingMode::Pairs => {
            // pairs (a, a + 2) with a ≥ 5
            let (first, last) = match boundary {
                Boundary::PairsTouchingRange => (lo.saturating_sub(2).max(5), hi),
                Boundary::MembersInRange => (lo, hi.saturating_sub(2)),
            };
            if first > last {
                return Ok(0);
            }
            Ok(table
                .primes_between(first, last)
                .filter(|&a| table.is_prime(a + 2))
                .count() as u64)
        }
    }
}

/// Twin primes in `[p, p²]` under the default boundary convention.
pub fn count_actual_twins(p: u64, table: &PrimeTable, mode: CountingMode) -> Result<u64> {
    count_actual_twins_with(p, table, Boundary::default(), mode)
}

pub fn count_actual_twins_with(
    p: u64,
    table: &PrimeTable,
    boundary: Boundary,
    mode: CountingMode,
) -> Result<u64> {
    if p < 5 || !is_prime_u64(p) {
        return Err(Error::Argument(format!("{p} is not a prime ≥ 5")));
    }
    let hi = p
        .checked_mul(p)
        .ok_or_else(|| Error::range("p", p, "p² overflows"))?;
    count_twins_between(p, hi, table, boundary, mode)
}

/// Individual twin primes in `[p, p²]` counted through the wheel `L_p`:
/// its members below `p² − 2` are exactly the twin primes there whose
/// partner is also `≥ p`. The few numbers the wheel cannot speak for (near
/// `p²`, and `p` or `p − 2` when the partner is below `p`) are classified
/// with the table.
pub fn count_twins_by_wheel(
    p: u64,
    table: &PrimeTable,
    boundary: Boundary,
    wheel_cap: u64,
) -> Result<u64> {
    let wheel = TwinWheel::at_level(p, wheel_cap)?;
    let x = p * p;
    if table.limit() < x + 2 {
        return Err(Error::range("p", p, "prime table too small"));
    }
    let inner = wheel
        .members_below(x - 2)
        .into_iter()
        .filter(|&m| m >= p)
        .count() as u64;
    let edge = (x - 2..=x).filter(|&q| is_twin_member(table, q)).count() as u64;
    // p itself is missing from L_p when its twin p − 2 is a smaller prime
    let lower = if table.is_prime(p - 2) && p - 2 >= 5 {
        match boundary {
            Boundary::PairsTouchingRange => 2,
            Boundary::MembersInRange => 1,
        }
    } else {
        0
    };
    Ok(inner + edge + lower)
}

/// Computes one row per prime: exact count, the uncorrected and corrected
/// estimates, and `r`.
pub fn build_table4(
    primes: &[u64],
    table: &PrimeTable,
    config: TableConfig,
) -> Result<TableReport> {
    for &p in primes {
        if p < 5 || !is_prime_u64(p) {
            return Err(Error::Argument(format!(
                "{p} in the prime list is not a prime ≥ 5"
            )));
        }
        let need = p * p + 2;
        if need > table.limit() {
            return Err(Error::range(
                "p",
                p,
                format!("needs a prime table through {need}, have {}", table.limit()),
            ));
        }
    }

    let rows = primes
        .par_iter()
        .map(|&p| {
            let actual = count_actual_twins_with(p, table, config.boundary, config.counting)?;
            let pi_p2 = table.count_primes_up_to(p * p)?;
            let mut row = EstimateRow::compute(p, actual, pi_p2, config.cutoff)?;
            if config.counting == CountingMode::Pairs {
                row.survivor /= 2.0;
                row.corrected /= 2.0;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let generated_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(TableReport {
        rows,
        metadata: ReportMetadata {
            generated_unix,
            sieve_limit: table.limit(),
            config,
        },
    })
}

/// Sieves just far enough for `primes` and builds the report.
pub fn reproduce_table4(primes: &[u64], config: TableConfig) -> Result<TableReport> {
    let max = primes.iter().copied().max().unwrap_or(5);
    let limit = max
        .checked_mul(max)
        .and_then(|x| x.checked_add(2))
        .ok_or_else(|| Error::range("p", max, "p² overflows"))?;
    let table = PrimeTable::new(limit)?;
    build_table4(primes, &table, config)
}

fn pct_diff(estimate: f64, actual: u64) -> f64 {
    100.0 * (estimate - actual as f64) / actual as f64
}

/// The two percent-difference series (uncorrected, corrected), from the
/// unrounded estimates.
pub fn figure1_series(report: &TableReport) -> Result<(FigureSeries, FigureSeries)> {
    let mut rows: Vec<&EstimateRow> = report.rows.iter().collect();
    rows.sort_by_key(|r| r.p);
    if let Some(r) = rows.iter().find(|r| r.actual == 0) {
        return Err(Error::Computation(format!(
            "actual count is zero at p = {}, percent difference undefined",
            r.p
        )));
    }
    let eq7 = FigureSeries {
        label: "eq7".into(),
        points: rows
            .iter()
            .map(|r| (r.p, pct_diff(r.survivor, r.actual)))
            .collect(),
    };
    let eq15 = FigureSeries {
        label: "eq15".into(),
        points: rows
            .iter()
            .map(|r| (r.p, pct_diff(r.corrected, r.actual)))
            .collect(),
    };
    Ok((eq7, eq15))
}

/// `x` with `digits` significant digits, fixed notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new leading digit (9.999996 -> 10.00000)
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded != 0.0 && rounded.abs().log10().floor() as i64 > magnitude && decimals > 0 {
        let decimals = decimals - 1;
        return format!("{x:.decimals$}");
    }
    s
}

/// `table4.csv` contents.
pub fn table4_csv(report: &TableReport) -> String {
    let mode = report.metadata.config.rounding;
    let mut out = String::from("p,actual,eq7,r,eq15\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.p,
            r.actual,
            r.survivor_rounded(mode),
            r.r_display(),
            r.corrected_rounded(mode)
        );
    }
    out
}

/// `.dat` contents: `<p> <pct_diff>` per line.
pub fn series_dat(series: &FigureSeries) -> String {
    let mut out = String::new();
    for &(p, d) in &series.points {
        let _ = writeln!(out, "{p} {}", format_significant(d, 6));
    }
    out
}

/// Writes `table4.csv`, `eq7.dat` and `eq15.dat` into `out_dir`.
pub fn export_report(
    report: &TableReport,
    series: &(FigureSeries, FigureSeries),
    out_dir: &Path,
) -> Result<Manifest> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = [
        ("table4.csv", table4_csv(report)),
        ("eq7.dat", series_dat(&series.0)),
        ("eq15.dat", series_dat(&series.1)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(Manifest { files: written })
}

/// Outcome of checking one computed row against its reference row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowComparison {
    pub p: u64,
    pub actual: (u64, u64),
    pub survivor: (i64, i64),
    pub r: (String, String),
    pub corrected: (i64, i64),
}

impl RowComparison {
    pub fn actual_matches(&self) -> bool {
        self.actual.0 == self.actual.1
    }

    pub fn survivor_within(&self, tol: i64) -> bool {
        (self.survivor.0 - self.survivor.1).abs() <= tol
    }

    pub fn r_matches(&self) -> bool {
        self.r.0 == self.r.1
    }

    pub fn corrected_within(&self, tol: i64) -> bool {
        (self.corrected.0 - self.corrected.1).abs() <= tol
    }
}

/// Lines up a report with [`REFERENCE_TABLE4`] (rows with no reference
/// counterpart are skipped).
pub fn compare_with_reference(report: &TableReport) -> Vec<RowComparison> {
    let mode = report.metadata.config.rounding;
    report
        .rows
        .iter()
        .filter_map(|r| {
            let reference = REFERENCE_TABLE4.iter().find(|x| x.p == r.p)?;
            Some(RowComparison {
                p: r.p,
                actual: (r.actual, reference.actual),
                survivor: (r.survivor_rounded(mode), reference.survivor),
                r: (r.r_display(), format!("{:.5}", reference.r)),
                corrected: (r.corrected_rounded(mode), reference.corrected),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve_primes;

    fn report(rows: Vec<EstimateRow>) -> TableReport {
        TableReport {
            rows,
            metadata: ReportMetadata {
                generated_unix: 0,
                sieve_limit: 0,
                config: TableConfig::default(),
            },
        }
    }

    #[test]
    fn count_at_five() {
        let t = sieve_primes(100).unwrap();
        assert_eq!(
            count_actual_twins(5, &t, CountingMode::Individual).unwrap(),
            6
        );
        assert_eq!(
            count_actual_twins_with(5, &t, Boundary::MembersInRange, CountingMode::Individual)
                .unwrap(),
            6
        );
        // (5,7), (11,13), (17,19)
        assert_eq!(count_actual_twins(5, &t, CountingMode::Pairs).unwrap(), 3);
    }

    #[test]
    fn boundary_conventions_differ_only_below_p() {
        let t = sieve_primes(200).unwrap();
        // 13 − 2 = 11 is prime, so 11 joins under the touching convention
        let touching = count_actual_twins_with(
            13,
            &t,
            Boundary::PairsTouchingRange,
            CountingMode::Individual,
        )
        .unwrap();
        let inside =
            count_actual_twins_with(13, &t, Boundary::MembersInRange, CountingMode::Individual)
                .unwrap();
        assert_eq!(touching, inside + 1);
        let touching = count_actual_twins_with(
            11,
            &t,
            Boundary::PairsTouchingRange,
            CountingMode::Individual,
        )
        .unwrap();
        let inside =
            count_actual_twins_with(11, &t, Boundary::MembersInRange, CountingMode::Individual)
                .unwrap();
        assert_eq!(touching, inside);
    }

    #[test]
    fn count_errors() {
        let t = sieve_primes(10_202).unwrap();
        assert!(count_actual_twins(101, &t, CountingMode::Individual).is_err());
        let t = sieve_primes(10_203).unwrap();
        assert_eq!(
            count_actual_twins(101, &t, CountingMode::Individual).unwrap(),
            404
        );
        assert!(count_actual_twins(9, &t, CountingMode::Individual).is_err());
    }

    #[test]
    fn wheel_count_agrees_for_small_levels() {
        let t = sieve_primes(19 * 19 + 2).unwrap();
        for p in [5u64, 7, 11, 13, 17, 19] {
            for b in [Boundary::PairsTouchingRange, Boundary::MembersInRange] {
                let direct = count_actual_twins_with(p, &t, b, CountingMode::Individual).unwrap();
                let wheel = count_twins_by_wheel(p, &t, b, 23).unwrap();
                assert_eq!(direct, wheel, "p = {p}, {b:?}");
            }
        }
    }

    #[test]
    fn table_rejects_composites() {
        let t = sieve_primes(1000).unwrap();
        let err = build_table4(&[11, 15], &t, TableConfig::default()).unwrap_err();
        assert!(err.to_string().contains("15"), "{err}");
        assert!(build_table4(&[37], &t, TableConfig::default()).is_err());
    }

    #[test]
    fn single_row_table() {
        let t = sieve_primes(100).unwrap();
        let rep = build_table4(&[5], &t, TableConfig::default()).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.rows[0].actual, 6);
        assert_eq!(rep.rows[0].pi_p2, 9);
    }

    #[test]
    fn zero_difference_and_zero_actual() {
        let row = EstimateRow {
            p: 5,
            actual: 6,
            pi_p2: 9,
            survivor: 6.0,
            r: 1.0,
            corrected: 6.0,
        };
        let (a, b) = figure1_series(&report(vec![row.clone()])).unwrap();
        assert_eq!(a.points, vec![(5, 0.0)]);
        assert_eq!(b.points, vec![(5, 0.0)]);
        let zero = EstimateRow { actual: 0, ..row };
        assert!(matches!(
            figure1_series(&report(vec![zero])),
            Err(Error::Computation(_))
        ));
    }

    #[test]
    fn empty_report_exports_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let rep = report(vec![]);
        let series = figure1_series(&rep).unwrap();
        let manifest = export_report(&rep, &series, dir.path()).unwrap();
        assert_eq!(manifest.files.len(), 3);
        assert_eq!(
            fs::read_to_string(dir.path().join("table4.csv")).unwrap(),
            "p,actual,eq7,r,eq15\n"
        );
        assert_eq!(fs::read_to_string(dir.path().join("eq7.dat")).unwrap(), "");
        assert_eq!(fs::read_to_string(dir.path().join("eq15.dat")).unwrap(), "");
    }

    #[test]
    fn export_io_error_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let rep = report(vec![]);
        let series = figure1_series(&rep).unwrap();
        let err = export_report(&rep, &series, &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(5.116_787_76, 6), "5.11679");
        assert_eq!(format_significant(-0.500_553_98, 6), "-0.500554");
        assert_eq!(format_significant(12.345_678, 6), "12.3457");
        assert_eq!(format_significant(9.999_999_7, 6), "10.0000");
        assert_eq!(format_significant(0.0, 6), "0");
    }
}
