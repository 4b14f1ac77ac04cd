//! Exact primality infrastructure.
//!
//! [`PrimeTable`] is a segmented sieve of Eratosthenes over the odd numbers
//! only (bit `i` stands for `2i + 1`; the prime 2 is handled out of band).
//! Segments are sieved independently, optionally in parallel, and each one
//! is a whole number of 64-bit words so that segment boundaries never split
//! a word. A small table of cumulative popcounts makes `π(x)` queries cost
//! at most a handful of word popcounts.
//!
//! The free functions cover the small-scale needs of the rest of the crate:
//! trial-division primality for validating arguments, primorials and
//! `φ(p#)` with checked arithmetic, and plain prime lists.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Hard upper bound accepted by [`sieve_primes`]. [`SieveConfig::cap`] may
/// lower it but never raise it.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 40;

/// Numbers covered by one segment unless configured otherwise. At one bit
/// per odd number this is a 32 KiB bitmap.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 19;

const WORD_BITS: u64 = 64;
// Words per entry of the cumulative popcount table.
const COUNT_BLOCK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Numbers per segment. Rounded up to a multiple of 128 so a segment
    /// holds whole words of odd numbers.
    pub segment_size: u64,
    pub parallel: bool,
    pub cap: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_size: DEFAULT_SEGMENT_SIZE,
            parallel: true,
            cap: MAX_SIEVE_LIMIT,
        }
    }
}

/// Primality of every integer in `[0, limit]`.
///
/// Immutable once built; every query takes `&self`, so a table can be shared
/// across threads freely.
#[derive(Clone)]
pub struct PrimeTable {
    limit: u64,
    segment_size: u64,
    words: Vec<u64>,
    // block_counts[b] = number of set bits in words[..b * COUNT_BLOCK]
    block_counts: Vec<u64>,
}

impl std::fmt::Debug for PrimeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeTable")
            .field("limit", &self.limit)
            .field("segment_size", &self.segment_size)
            .field("words", &self.words.len())
            .finish()
    }
}

/// Sieves `[0, limit]` with the default configuration.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    PrimeTable::with_config(limit, SieveConfig::default())
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        sieve_primes(limit)
    }

    pub fn with_config(limit: u64, config: SieveConfig) -> Result<Self> {
        let cap = config.cap.min(MAX_SIEVE_LIMIT);
        if limit < 2 {
            return Err(Error::range("sieve limit", limit, "must be at least 2"));
        }
        if limit > cap {
            return Err(Error::range(
                "sieve limit",
                limit,
                format!("exceeds the cap {cap}"),
            ));
        }

        let segment_size = round_up(config.segment_size.max(1), 2 * WORD_BITS);
        let n_bits = limit.div_ceil(2);
        let n_words = n_bits.div_ceil(WORD_BITS) as usize;
        let seg_words = (segment_size / (2 * WORD_BITS)) as usize;

        let base = simple_sieve(isqrt(limit));
        let odd_base: Vec<u64> = base.into_iter().filter(|&p| p > 2).collect();

        let mut words = vec![0u64; n_words];
        let sieve_chunk = |(s, chunk): (usize, &mut [u64])| {
            let first_bit = (s * seg_words) as u64 * WORD_BITS;
            sieve_segment(first_bit, chunk, &odd_base, n_bits);
        };
        if config.parallel {
            words
                .par_chunks_mut(seg_words)
                .enumerate()
                .for_each(sieve_chunk);
        } else {
            words
                .chunks_mut(seg_words)
                .enumerate()
                .for_each(sieve_chunk);
        }

        let mut block_counts = Vec::with_capacity(n_words / COUNT_BLOCK + 2);
        let mut running = 0u64;
        block_counts.push(0);
        for block in words.chunks(COUNT_BLOCK) {
            running += block.iter().map(|w| w.count_ones() as u64).sum::<u64>();
            block_counts.push(running);
        }

        Ok(PrimeTable {
            limit,
            segment_size,
            words,
            block_counts,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_size(&self) -> u64 {
        self.segment_size
    }

    /// Primality of `q`. Values above the limit are reported as not prime;
    /// use [`PrimeTable::check_prime`] when that should be an error.
    #[inline]
    pub fn is_prime(&self, q: u64) -> bool {
        if q == 2 {
            return true;
        }
        if q < 2 || q.is_multiple_of(2) || q > self.limit {
            return false;
        }
        let bit = q / 2;
        self.words[(bit / WORD_BITS) as usize] >> (bit % WORD_BITS) & 1 == 1
    }

    pub fn check_prime(&self, q: u64) -> Result<bool> {
        if q > self.limit {
            return Err(Error::range(
                "query",
                q,
                format!("table only covers [0, {}]", self.limit),
            ));
        }
        Ok(self.is_prime(q))
    }

    /// `π(x)`, the number of primes `≤ x`.
    pub fn count_primes_up_to(&self, x: u64) -> Result<u64> {
        if x > self.limit {
            return Err(Error::range(
                "x",
                x,
                format!("table only covers [0, {}]", self.limit),
            ));
        }
        if x < 2 {
            return Ok(0);
        }
        // odd numbers 3..=x live in bits 1..=(x-1)/2; bit 0 (the number 1) is never set
        Ok(1 + self.count_bits_through((x - 1) / 2))
    }

    /// Number of primes in `[lo, hi]`.
    pub fn count_primes_between(&self, lo: u64, hi: u64) -> Result<u64> {
        if lo > hi {
            return Ok(0);
        }
        let upper = self.count_primes_up_to(hi)?;
        let lower = if lo == 0 {
            0
        } else {
            self.count_primes_up_to(lo - 1)?
        };
        Ok(upper - lower)
    }

    fn count_bits_through(&self, bit: u64) -> u64 {
        let word = (bit / WORD_BITS) as usize;
        let block = word / COUNT_BLOCK;
        let mut total = self.block_counts[block];
        for w in &self.words[block * COUNT_BLOCK..word] {
            total += w.count_ones() as u64;
        }
        let offset = bit % WORD_BITS;
        let mask = if offset == WORD_BITS - 1 {
            u64::MAX
        } else {
            (1u64 << (offset + 1)) - 1
        };
        total + (self.words[word] & mask).count_ones() as u64
    }

    /// All primes in the table, ascending.
    pub fn primes(&self) -> Primes<'_> {
        self.primes_between(0, self.limit)
    }

    /// Primes in `[lo, hi]` (clamped to the table), ascending.
    pub fn primes_between(&self, lo: u64, hi: u64) -> Primes<'_> {
        let hi = hi.min(self.limit);
        let emit_two = lo <= 2 && hi >= 2;
        let start_bit = if lo <= 3 { 1 } else { lo / 2 };
        let end_bit = if hi < 3 { 0 } else { (hi - 1) / 2 + 1 };
        let word = (start_bit / WORD_BITS) as usize;
        let current = if start_bit < end_bit {
            self.words[word] & (u64::MAX << (start_bit % WORD_BITS))
        } else {
            0
        };
        Primes {
            table: self,
            emit_two,
            word,
            current,
            end_bit,
        }
    }

    /// The `n`-th prime (`p_1 = 2`) if it lies within the table.
    pub fn nth_prime(&self, n: u64) -> Option<u64> {
        if n == 0 {
            return None;
        }
        self.primes().nth((n - 1) as usize)
    }
}

/// Iterator over the primes of a [`PrimeTable`] range.
pub struct Primes<'a> {
    table: &'a PrimeTable,
    emit_two: bool,
    word: usize,
    current: u64,
    end_bit: u64,
}

impl Iterator for Primes<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.emit_two {
            self.emit_two = false;
            return Some(2);
        }
        loop {
            if self.current != 0 {
                let bit = self.word as u64 * WORD_BITS + self.current.trailing_zeros() as u64;
                if bit >= self.end_bit {
                    self.current = 0;
                    return None;
                }
                self.current &= self.current - 1;
                return Some(2 * bit + 1);
            }
            self.word += 1;
            if self.word as u64 * WORD_BITS >= self.end_bit {
                return None;
            }
            self.current = self.table.words[self.word];
        }
    }
}

fn sieve_segment(first_bit: u64, chunk: &mut [u64], odd_base: &[u64], n_bits: u64) {
    chunk.fill(u64::MAX);
    let end_bit = (first_bit + chunk.len() as u64 * WORD_BITS).min(n_bits);
    if end_bit <= first_bit {
        chunk.fill(0);
        return;
    }
    // clear the tail past the last odd number <= limit
    let valid = end_bit - first_bit;
    let full = (valid / WORD_BITS) as usize;
    let rem = valid % WORD_BITS;
    if full < chunk.len() {
        chunk[full] = if rem == 0 { 0 } else { (1u64 << rem) - 1 };
        chunk[full + 1..].fill(0);
    }
    if first_bit == 0 {
        chunk[0] &= !1; // the number 1
    }

    let lo = 2 * first_bit + 1;
    let hi = 2 * (end_bit - 1) + 1;
    for &p in odd_base {
        let sq = p * p;
        if sq > hi {
            break;
        }
        let mut m = if sq >= lo { sq } else { lo.div_ceil(p) * p };
        if m % 2 == 0 {
            m += p;
        }
        let mut bit = m / 2 - first_bit;
        while bit < valid {
            chunk[(bit / WORD_BITS) as usize] &= !(1u64 << (bit % WORD_BITS));
            bit += p;
        }
    }
}

fn round_up(x: u64, multiple: u64) -> u64 {
    x.div_ceil(multiple) * multiple
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Primes `≤ n` from an unsegmented byte sieve. Meant for small `n`.
pub fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Deterministic trial division. Fine for the argument validation this
/// crate needs (inputs well below `2^40`).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Smallest prime factor of `n ≥ 2`.
pub fn smallest_prime_factor(n: u64) -> u64 {
    debug_assert!(n >= 2);
    if n.is_multiple_of(2) {
        return 2;
    }
    if n.is_multiple_of(3) {
        return 3;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        if n.is_multiple_of(d + 2) {
            return d + 2;
        }
        d += 6;
    }
    n
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}

/// Largest prime strictly below `n`, if any.
pub fn prev_prime(n: u64) -> Option<u64> {
    (2..n).rev().find(|&c| is_prime_u64(c))
}

/// The `n`-th prime, `p_1 = 2`.
pub fn nth_prime(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Argument("prime index must be at least 1".into()));
    }
    let bound = if n < 6 {
        15
    } else {
        let nf = n as f64;
        (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 3
    };
    let table = sieve_primes(bound)?;
    table
        .nth_prime(n)
        .ok_or_else(|| Error::Computation(format!("prime bound {bound} too small for index {n}")))
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::Argument(format!("{p} is not prime")))
    }
}

/// `p# = ∏_{q ≤ p} q`.
pub fn primorial(p: u64) -> Result<u64> {
    require_prime(p)?;
    simple_sieve(p).into_iter().try_fold(1u64, |acc, q| {
        acc.checked_mul(q)
            .ok_or_else(|| Error::range("primorial argument", p, "product overflows 64 bits"))
    })
}

/// `φ(p#) = ∏_{q ≤ p} (q − 1)`.
pub fn phi_primorial(p: u64) -> Result<u64> {
    require_prime(p)?;
    simple_sieve(p).into_iter().try_fold(1u64, |acc, q| {
        acc.checked_mul(q - 1)
            .ok_or_else(|| Error::range("totient argument", p, "product overflows 64 bits"))
    })
}
