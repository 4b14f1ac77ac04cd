//! The double sieve.
//!
//! Every prime above 3 is `6n ± 1`, and a twin pair is always `{6n − 1,
//! 6n + 1}` for a single `n`. Call those two numbers *twins of each other*
//! whether or not they are prime. The double sieve starts from all `6n ± 1`
//! and, for each prime `P = 5, 7, 11, …` in turn, deletes the multiples of
//! `P` **together with their twins**. What is left after sifting by every
//! prime below `p` is the wheel `L_p`.
//!
//! A [`TwinWheel`] stores one full period of `L_p` as the table `T_p`:
//! `period = p#`, the members lie in the window `[5, 5 + period)`, and the
//! table is laid out as `p` rows over the *header* residues, which are the
//! members of the first `period / p` block. So `T_5` is 5 rows of `{5, 7}`,
//! `T_7` is 7 rows of `{11, 13, 17, 19, 29, 31}` stepping by 30, and so on.
//!
//! [`TwinWheel::advance`] performs one sieving step: drop the multiples of
//! the current level and their twins from `T_p` (each column loses exactly
//! two entries), then repeat what is left over `p'` rows to form `T_{p'}`.
//!
//! The module also keeps the exact bookkeeping of which *primes* each step
//! removes ([`DeletionLedger`]), which the estimators only approximate.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::primes::{is_prime_u64, next_prime, primorial, smallest_prime_factor, PrimeTable};

/// Default highest level [`TwinWheel::advance`] will materialise.
pub const DEFAULT_WHEEL_CAP: u64 = 23;

/// Smallest member of any wheel; also where the canonical window starts.
const WINDOW_START: u64 = 5;

/// The designated twin of `n ≡ ±1 (mod 6)`: `n + 2` for `6k − 1`, `n − 2`
/// for `6k + 1`.
///
/// # Panics
///
/// If `n` is not `±1 (mod 6)` or is 1.
#[inline]
pub fn twin_of(n: u64) -> u64 {
    match n % 6 {
        5 => n + 2,
        1 if n > 1 => n - 2,
        _ => panic!("{n} is not of the form 6k ± 1 with k ≥ 1"),
    }
}

/// `L_p` for a prime level `p ≥ 5`, as one period of its table `T_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinWheel {
    level: u64,
    period: u64,
    residues: Vec<u64>,
}

/// How an entry of `T_p` fares at the next sieving step (by `p` itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Kept,
    /// Divisible by the level.
    Multiple,
    /// The twin of a multiple of the level.
    TwinOfMultiple,
}

impl TwinWheel {
    /// `L_5`: every `6n ± 1`, tabulated over the period 30 as `5..=31`.
    pub fn initial() -> Self {
        TwinWheel {
            level: 5,
            period: 30,
            residues: vec![5, 7, 11, 13, 17, 19, 23, 25, 29, 31],
        }
    }

    /// Builds `L_level` by advancing from `L_5`.
    pub fn at_level(level: u64, cap: u64) -> Result<Self> {
        if level < 5 || !is_prime_u64(level) {
            return Err(Error::Argument(format!(
                "wheel level must be a prime ≥ 5, got {level}"
            )));
        }
        let mut wheel = TwinWheel::initial();
        while wheel.level < level {
            wheel = wheel.advance_capped(cap)?;
        }
        Ok(wheel)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// `level#`, the length of one full table.
    pub fn period(&self) -> u64 {
        self.period
    }

    /// Every entry of `T_p`, ascending, inside `[5, 5 + period)`.
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// Length of one row of `T_p` (`period / level`).
    pub fn row_step(&self) -> u64 {
        self.period / self.level
    }

    /// The column headers of `T_p`: the members in the first row block.
    pub fn headers(&self) -> &[u64] {
        let end = WINDOW_START + self.row_step();
        let n = self.residues.partition_point(|&r| r < end);
        &self.residues[..n]
    }

    /// Number of columns; `2·∏(p_k − 2)` over the odd primes below the level.
    pub fn column_count(&self) -> usize {
        self.headers().len()
    }

    /// Entry of `T_p` at `(row, column)`.
    pub fn entry(&self, row: u64, column: usize) -> u64 {
        self.headers()[column] + row * self.row_step()
    }

    /// Members per unit length, `residue count / period`, as a reduced
    /// fraction `(numerator, denominator)`.
    pub fn density(&self) -> (u64, u64) {
        let n = self.residues.len() as u64;
        let g = gcd(n, self.period);
        (n / g, self.period / g)
    }

    /// Whether `n` belongs to `L_p`.
    pub fn contains(&self, n: u64) -> bool {
        if n < WINDOW_START {
            return false;
        }
        let rep = (n - WINDOW_START) % self.period + WINDOW_START;
        self.residues.binary_search(&rep).is_ok()
    }

    /// Classifies an entry for the step that sieves by this level.
    pub fn mark(&self, n: u64) -> Mark {
        if n.is_multiple_of(self.level) {
            Mark::Multiple
        } else if twin_of(n).is_multiple_of(self.level) {
            Mark::TwinOfMultiple
        } else {
            Mark::Kept
        }
    }

    /// The entries removed by the next step, ascending.
    pub fn deletions(&self) -> Vec<(u64, Mark)> {
        self.residues
            .iter()
            .map(|&r| (r, self.mark(r)))
            .filter(|&(_, m)| m != Mark::Kept)
            .collect()
    }

    /// Sieves by the current level and re-tabulates over the next prime,
    /// refusing levels above [`DEFAULT_WHEEL_CAP`].
    pub fn advance(&self) -> Result<Self> {
        self.advance_capped(DEFAULT_WHEEL_CAP)
    }

    pub fn advance_capped(&self, cap: u64) -> Result<Self> {
        let next = next_prime(self.level);
        if next > cap {
            return Err(Error::Resource { level: next, cap });
        }
        let survivors: Vec<u64> = self
            .residues
            .iter()
            .copied()
            .filter(|&r| r % self.level != 0 && !twin_of(r).is_multiple_of(self.level))
            .collect();
        let period = self
            .period
            .checked_mul(next)
            .ok_or(Error::Resource { level: next, cap })?;
        let mut residues = Vec::with_capacity(survivors.len() * next as usize);
        for row in 0..next {
            let offset = row * self.period;
            residues.extend(survivors.iter().map(|&r| r + offset));
        }
        // survivors are sorted and the blocks are disjoint, so this stays sorted
        Ok(TwinWheel {
            level: next,
            period,
            residues,
        })
    }

    /// All members of `L_p` below `bound`, ascending.
    pub fn members_below(&self, bound: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut base = 0u64;
        'outer: loop {
            for &r in &self.residues {
                let m = r + base;
                if m >= bound {
                    break 'outer;
                }
                out.push(m);
            }
            base += self.period;
        }
        out
    }

    /// `T_p` as aligned text, one table row per line. Entries removed by the
    /// next step are suffixed `*` (multiple of the level) or `'` (twin of a
    /// multiple).
    pub fn render_text(&self) -> String {
        let width = (WINDOW_START + self.period).to_string().len() + 1;
        let mut out = String::new();
        for row in 0..self.level {
            let mut line = String::new();
            for col in 0..self.column_count() {
                let n = self.entry(row, col);
                let tag = match self.mark(n) {
                    Mark::Kept => ' ',
                    Mark::Multiple => '*',
                    Mark::TwinOfMultiple => '\'',
                };
                let _ = write!(line, "{n:>width$}{tag}");
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    /// `T_p` as CSV: `row,column,value,mark`.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("row,column,value,mark\n");
        for row in 0..self.level {
            for col in 0..self.column_count() {
                let n = self.entry(row, col);
                let mark = match self.mark(n) {
                    Mark::Kept => "kept",
                    Mark::Multiple => "multiple",
                    Mark::TwinOfMultiple => "twin_of_multiple",
                };
                let _ = writeln!(out, "{row},{col},{n},{mark}");
            }
        }
        out
    }
}

/// `L_5`.
pub fn initial_wheel() -> TwinWheel {
    TwinWheel::initial()
}

pub fn advance(wheel: &TwinWheel) -> Result<TwinWheel> {
    wheel.advance()
}

pub fn wheel_members_below(wheel: &TwinWheel, bound: u64) -> Vec<u64> {
    wheel.members_below(bound)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Where a prime leaves the double sieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeletionStep {
    /// Removed by the step that sieves by this prime.
    At(u64),
    /// Still present once every step below the level has run.
    Survives,
}

/// The step at which the prime `q ≥ 5` is deleted when sieving by all
/// primes below `max_level`.
///
/// `q` goes at step `q` (as a multiple of itself) or at the smallest prime
/// factor of its twin, whichever comes first. Note that the smaller member
/// of a twin pair deletes the larger one: 7 is removed with 5, 13 with 11.
pub fn deletion_step_of(q: u64, max_level: u64) -> Result<DeletionStep> {
    if q < 5 || !is_prime_u64(q) {
        return Err(Error::Argument(format!("{q} is not a prime ≥ 5")));
    }
    let step = q.min(smallest_prime_factor(twin_of(q)));
    Ok(if step < max_level {
        DeletionStep::At(step)
    } else {
        DeletionStep::Survives
    })
}

/// Exact count of primes removed at each sieving step below `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionLedger {
    /// Exclusive upper bound (`p²` for the level `p`).
    pub bound: u64,
    /// `(sieving prime, primes below bound deleted at that step)`, one
    /// entry per prime `5 ≤ p_k < p`, ascending.
    pub steps: Vec<(u64, u64)>,
    /// Primes in `[5, bound)` left in the final wheel.
    pub survivors: u64,
}

impl DeletionLedger {
    pub fn total_deleted(&self) -> u64 {
        self.steps.iter().map(|&(_, n)| n).sum()
    }

    pub fn deleted_at(&self, prime: u64) -> Option<u64> {
        self.steps
            .iter()
            .find(|&&(p, _)| p == prime)
            .map(|&(_, n)| n)
    }
}

/// Classifies every prime in `[5, p²)` by its deletion step under `L_p`.
pub fn exact_deletion_ledger(p: u64, table: &PrimeTable) -> Result<DeletionLedger> {
    if p < 5 || !is_prime_u64(p) {
        return Err(Error::Argument(format!(
            "ledger level must be a prime ≥ 5, got {p}"
        )));
    }
    let bound = p
        .checked_mul(p)
        .ok_or_else(|| Error::range("ledger level", p, "p² overflows"))?;
    if table.limit() < bound {
        return Err(Error::range(
            "ledger level",
            p,
            format!(
                "needs a prime table through {bound}, have {}",
                table.limit()
            ),
        ));
    }

    let sievers: Vec<u64> = table.primes_between(5, p - 1).collect();
    // first_factor[n / 2] = smallest sieving prime dividing odd n, or 0
    // the largest twin of a prime below p² is p² itself
    let slots = (bound / 2 + 1) as usize;
    let mut first_factor = vec![0u32; slots];
    for &f in &sievers {
        let mut m = f;
        while m <= bound {
            let slot = &mut first_factor[(m / 2) as usize];
            if *slot == 0 {
                *slot = f as u32;
            }
            m += 2 * f;
        }
    }

    let mut counts = vec![0u64; sievers.len()];
    let mut survivors = 0u64;
    for q in table.primes_between(5, bound - 1) {
        let twin_factor = first_factor[(twin_of(q) / 2) as usize] as u64;
        let own = if q < p { q } else { 0 };
        let step = match (own, twin_factor) {
            (0, 0) => None,
            (0, f) | (f, 0) => Some(f),
            (a, b) => Some(a.min(b)),
        };
        match step {
            Some(s) => {
                let idx = sievers.binary_search(&s).expect("step is a sieving prime");
                counts[idx] += 1;
            }
            None => survivors += 1,
        }
    }

    Ok(DeletionLedger {
        bound,
        steps: sievers.into_iter().zip(counts).collect(),
        survivors,
    })
}

/// Convenience: the primorial period of the table for a prime level.
pub fn period_of_level(level: u64) -> Result<u64> {
    primorial(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve_primes;

    #[test]
    fn initial_wheel_matches_t5() {
        let w = initial_wheel();
        assert_eq!(w.level(), 5);
        assert_eq!(w.period(), 30);
        assert_eq!(w.residues(), &[5, 7, 11, 13, 17, 19, 23, 25, 29, 31]);
        assert_eq!(w.residues().len(), 2 * 5);
        assert_eq!(twin_of(5), 7);
        assert_eq!(twin_of(29), 31);
        assert_eq!(w.headers(), &[5, 7]);
    }

    #[test]
    fn twin_of_is_an_involution() {
        for n in (5..10_000).filter(|n| n % 6 == 1 || n % 6 == 5) {
            assert_eq!(twin_of(twin_of(n)), n);
            assert_eq!(n.abs_diff(twin_of(n)), 2);
        }
    }

    #[test]
    #[should_panic]
    fn twin_of_rejects_multiples_of_three() {
        twin_of(9);
    }

    #[test]
    fn advance_to_l7_and_l11() {
        let l7 = initial_wheel().advance().unwrap();
        assert_eq!(l7.level(), 7);
        assert_eq!(l7.period(), 210);
        assert_eq!(l7.headers(), &[11, 13, 17, 19, 29, 31]);
        assert_eq!(l7.residues().len(), 6 * 7);

        let deleted: Vec<u64> = l7.deletions().iter().map(|&(n, _)| n).collect();
        assert_eq!(
            deleted,
            vec![47, 49, 77, 79, 89, 91, 119, 121, 131, 133, 161, 163]
        );

        let l11 = l7.advance().unwrap();
        assert_eq!(l11.period(), 2310);
        assert_eq!(
            l11.headers(),
            &[
                11, 13, 17, 19, 29, 31, 41, 43, 59, 61, 71, 73, 101, 103, 107, 109, 137, 139, 149,
                151, 167, 169, 179, 181, 191, 193, 197, 199, 209, 211
            ]
        );
    }

    #[test]
    fn deletions_by_five_are_5_7_23_25() {
        let marks = initial_wheel().deletions();
        assert_eq!(
            marks,
            vec![
                (5, Mark::Multiple),
                (7, Mark::TwinOfMultiple),
                (23, Mark::TwinOfMultiple),
                (25, Mark::Multiple)
            ]
        );
    }

    #[test]
    fn each_column_loses_two() {
        let mut w = initial_wheel();
        while w.level() < 19 {
            let cols = w.column_count();
            let level = w.level() as usize;
            for c in 0..cols {
                let gone = (0..w.level())
                    .filter(|&r| w.mark(w.entry(r, c)) != Mark::Kept)
                    .count();
                assert_eq!(gone, 2, "level {level} column {c}");
            }
            let next = w.advance().unwrap();
            assert_eq!(next.column_count(), cols * (level - 2));
            w = next;
        }
    }

    #[test]
    fn column_counts_and_density() {
        let l5 = initial_wheel();
        let l7 = l5.advance().unwrap();
        let l11 = l7.advance().unwrap();
        assert_eq!(l5.density(), (1, 3));
        assert_eq!(l7.density(), (1, 5));
        assert_eq!(l11.density(), (1, 7));
        assert_eq!(l7.column_count(), 6);
        assert_eq!(l11.column_count(), 30);
    }

    #[test]
    fn cap_is_enforced() {
        let w = TwinWheel::at_level(11, 11).unwrap();
        assert!(matches!(
            w.advance_capped(11),
            Err(Error::Resource { level: 13, cap: 11 })
        ));
        assert!(TwinWheel::at_level(9, 23).is_err());
        assert!(TwinWheel::at_level(3, 23).is_err());
    }

    #[test]
    fn members_below_small_bounds() {
        let l5 = initial_wheel();
        assert_eq!(l5.members_below(23), vec![5, 7, 11, 13, 17, 19]);
        assert!(l5.members_below(1).is_empty());
        assert!(l5.members_below(5).is_empty());
        let l11 = TwinWheel::at_level(11, 23).unwrap();
        assert_eq!(
            l11.members_below(119),
            vec![11, 13, 17, 19, 29, 31, 41, 43, 59, 61, 71, 73, 101, 103, 107, 109]
        );
    }

    #[test]
    fn contains_agrees_with_members_below() {
        let l11 = TwinWheel::at_level(11, 23).unwrap();
        let members = l11.members_below(5000);
        for n in 0..5000 {
            assert_eq!(
                l11.contains(n),
                members.binary_search(&n).is_ok(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn deletion_steps() {
        assert_eq!(deletion_step_of(23, 1000).unwrap(), DeletionStep::At(5));
        assert_eq!(deletion_step_of(47, 1000).unwrap(), DeletionStep::At(7));
        assert_eq!(deletion_step_of(5, 1000).unwrap(), DeletionStep::At(5));
        assert_eq!(deletion_step_of(7, 1000).unwrap(), DeletionStep::At(5));
        // 13 is the twin of 11, so the step by 11 takes it
        assert_eq!(deletion_step_of(13, 1000).unwrap(), DeletionStep::At(11));
        assert_eq!(deletion_step_of(13, 11).unwrap(), DeletionStep::Survives);
        assert_eq!(deletion_step_of(41, 1000).unwrap(), DeletionStep::At(41));
        assert_eq!(deletion_step_of(41, 41).unwrap(), DeletionStep::Survives);
        assert!(deletion_step_of(25, 100).is_err());
        assert!(deletion_step_of(3, 100).is_err());
    }

    #[test]
    fn ledger_small_levels() {
        let t = sieve_primes(200).unwrap();
        let l5 = exact_deletion_ledger(5, &t).unwrap();
        assert!(l5.steps.is_empty());
        assert_eq!(l5.survivors, t.count_primes_up_to(24).unwrap() - 2);

        // below 49 the step by 5 takes 5 itself and the twins of 5, 25, 35
        let l7 = exact_deletion_ledger(7, &t).unwrap();
        let brute: u64 = (5..49)
            .filter(|&q| is_prime_u64(q))
            .filter(|&q| deletion_step_of(q, 7).unwrap() == DeletionStep::At(5))
            .count() as u64;
        assert_eq!(brute, 4);
        assert_eq!(l7.steps, vec![(5, brute)]);
        assert_eq!(
            l7.total_deleted() + l7.survivors,
            t.count_primes_up_to(48).unwrap() - 2
        );
    }

    #[test]
    fn ledger_matches_per_prime_classification() {
        let t = sieve_primes(10_300).unwrap();
        let ledger = exact_deletion_ledger(101, &t).unwrap();
        let mut steps = std::collections::BTreeMap::new();
        let mut survivors = 0;
        for q in t.primes_between(5, 10_200) {
            match deletion_step_of(q, 101).unwrap() {
                DeletionStep::At(s) => *steps.entry(s).or_insert(0u64) += 1,
                DeletionStep::Survives => survivors += 1,
            }
        }
        assert_eq!(ledger.survivors, survivors);
        for &(s, n) in &ledger.steps {
            assert_eq!(steps.get(&s).copied().unwrap_or(0), n, "step {s}");
        }
        assert_eq!(
            ledger.total_deleted() + ledger.survivors,
            t.count_primes_up_to(10_201).unwrap() - 2
        );
    }

    #[test]
    fn ledger_needs_enough_table() {
        let t = sieve_primes(10_200).unwrap();
        assert!(matches!(
            exact_deletion_ledger(101, &t),
            Err(Error::Range { .. })
        ));
        assert!(exact_deletion_ledger(100, &t).is_err());
    }

    #[test]
    fn rendered_t7_layout() {
        let l7 = initial_wheel().advance().unwrap();
        let text = l7.render_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(
            lines[0].split_whitespace().collect::<Vec<_>>(),
            ["11", "13", "17", "19", "29", "31"]
        );
        assert_eq!(
            lines[1].split_whitespace().collect::<Vec<_>>(),
            ["41", "43", "47'", "49*", "59", "61"]
        );
        assert!(lines[6].ends_with("211"));
        let csv = l7.render_csv();
        assert_eq!(csv.lines().count(), 1 + 42);
        assert_eq!(csv.matches(",multiple").count(), 6);
        assert_eq!(csv.matches(",twin_of_multiple").count(), 6);
    }

    #[test]
    fn period_is_primorial() {
        let mut w = initial_wheel();
        while w.level() < 17 {
            assert_eq!(w.period(), period_of_level(w.level()).unwrap());
            w = w.advance().unwrap();
        }
    }
}
