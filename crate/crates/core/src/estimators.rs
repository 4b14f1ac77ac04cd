//! Closed-form twin-prime estimates built on the double sieve.
//!
//! Two routes to the number of twin primes in `[p, p²]`:
//!
//! * **Deleted primes.** At the step that sieves by `p_k`, the wheel has
//!   `2·∏_{i=2}^{k−1}(p_i − 2)` columns per period `p_k#`, and each column
//!   gives up one twin-of-a-multiple that is coprime to the period. By
//!   equidistribution over the `φ(p_k#)` reduced classes, about
//!   `∏_{i=3}^{k−1} (p_i − 2)/(p_i − 1) · π(p²)/(p_k − 1)` primes below `p²`
//!   go at that step ([`deleted_prime_estimate`]). Those terms telescope
//!   ([`telescoped_deletions`]), and the primes left over are the estimate
//!   `∏_{5 ≤ q ≤ p} (q − 2)/(q − 1) · π(p²)` ([`survivor_estimate`]).
//!
//! * **Corrected.** The same survivor estimate scaled by the factor `r` that
//!   relates the real prime count below `p²` to the density of numbers
//!   coprime to `p#` ([`correction_factor`]). Algebraically the product is
//!   `π(x)²/x · 4·∏_{3 ≤ q ≤ √x} q(q − 2)/(q − 1)²` ([`corrected_estimate`]);
//!   replacing `π(x)` by `x / ln x` gives the familiar asymptotic form
//!   ([`asymptotic_estimate`]). `r` tends to `e^γ / 2` by Mertens' theorem.
//!
//! All counts of *individual* twin primes; halve for pairs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::primes::{is_prime_u64, next_prime, simple_sieve};

/// Euler–Mascheroni constant to 15 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_533;

/// Products with more factors than this are accumulated as sums of logs.
const LOG_SPACE_THRESHOLD: usize = 100_000;

/// `e^γ / 2`, the limit of the correction factor.
pub fn half_e_gamma() -> f64 {
    EULER_GAMMA.exp() / 2.0
}

/// Which primes the correction product `∏ q/(q − 1)` runs over.
///
/// The formula reads "all primes `q ≤ p`". The reference comparison table,
/// however, is only reproduced when the product also takes in the prime
/// after `p`; its `r` and corrected columns carry that extra factor
/// `p'/(p' − 1)`. Both are offered; the default follows the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductCutoff {
    /// `∏_{q ≤ p}`, literally.
    ThroughP,
    /// `∏_{q ≤ nextprime(p)}`, matching the reference table.
    #[default]
    ThroughNextPrime,
}

impl ProductCutoff {
    fn bound(self, p: u64) -> u64 {
        match self {
            ProductCutoff::ThroughP => p,
            ProductCutoff::ThroughNextPrime => next_prime(p),
        }
    }
}

/// How estimates are turned into the integers shown in a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundingMode {
    #[default]
    HalfAwayFromZero,
    Truncate,
}

impl RoundingMode {
    pub fn apply(self, x: f64) -> i64 {
        match self {
            RoundingMode::HalfAwayFromZero => x.round() as i64,
            RoundingMode::Truncate => x.trunc() as i64,
        }
    }
}

/// `x` rounded half-up to `decimals` places, as it would be displayed.
pub fn round_decimals(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (x * scale + 0.5).floor() / scale
}

/// Product of `factors`, in log space once there are many of them.
pub fn stable_product(factors: &[f64]) -> f64 {
    if factors.len() > LOG_SPACE_THRESHOLD {
        factors.iter().map(|f| f.ln()).sum::<f64>().exp()
    } else {
        factors.iter().product()
    }
}

fn require_prime_at_least_5(p: u64) -> Result<()> {
    if p >= 5 && is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::Argument(format!("{p} is not a prime ≥ 5")))
    }
}

fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    simple_sieve(hi).into_iter().filter(|&q| q >= lo).collect()
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Density of `L_{p_n}` over a full period: `∏ (q − 2)/q` for the odd
/// primes `q < p_n`, exactly.
///
/// ```
/// use num_rational::BigRational;
/// use twin_sieve::estimators::wheel_density;
/// assert_eq!(wheel_density(7).unwrap(), BigRational::new(1.into(), 5.into()));
/// assert_eq!(wheel_density(11).unwrap(), BigRational::new(1.into(), 7.into()));
/// ```
pub fn wheel_density(p_n: u64) -> Result<BigRational> {
    require_prime_at_least_5(p_n)?;
    Ok(primes_between(3, p_n - 1)
        .into_iter()
        .fold(BigRational::one(), |acc, q| acc * ratio(q - 2, q)))
}

/// Share of `π(p²)` deleted at the step that sieves by `p_k`:
/// `∏_{5 ≤ q < p_k} (q − 2)/(q − 1) · 1/(p_k − 1)`, exactly.
pub fn deleted_fraction_exact(p_k: u64) -> Result<BigRational> {
    require_prime_at_least_5(p_k)?;
    let head = primes_between(5, p_k - 1)
        .into_iter()
        .fold(BigRational::one(), |acc, q| acc * ratio(q - 2, q - 1));
    Ok(head * ratio(1, p_k - 1))
}

/// Share of `π(p²)` surviving every step through `p`:
/// `∏_{5 ≤ q ≤ p} (q − 2)/(q − 1)`, exactly.
pub fn survivor_fraction_exact(p: u64) -> Result<BigRational> {
    require_prime_at_least_5(p)?;
    Ok(primes_between(5, p)
        .into_iter()
        .fold(BigRational::one(), |acc, q| acc * ratio(q - 2, q - 1)))
}

/// Floating-point [`deleted_fraction_exact`].
pub fn deleted_fraction(p_k: u64) -> Result<f64> {
    require_prime_at_least_5(p_k)?;
    let mut factors: Vec<f64> = primes_between(5, p_k - 1)
        .into_iter()
        .map(|q| (q - 2) as f64 / (q - 1) as f64)
        .collect();
    factors.push(1.0 / (p_k - 1) as f64);
    Ok(stable_product(&factors))
}

fn check_step_order(p: u64, p_k: u64) -> Result<()> {
    require_prime_at_least_5(p)?;
    require_prime_at_least_5(p_k)?;
    if p_k >= p {
        return Err(Error::Argument(format!(
            "sieving prime {p_k} must be below the level {p}"
        )));
    }
    Ok(())
}

/// Approximate number of primes below `p²` deleted at the step by `p_k`
/// (`5 ≤ p_k < p`), given `pi_p2 = π(p²)`.
pub fn deleted_prime_estimate(p: u64, p_k: u64, pi_p2: u64) -> Result<f64> {
    check_step_order(p, p_k)?;
    Ok(deleted_fraction(p_k)? * pi_p2 as f64)
}

/// The same estimate through the column count and totient:
/// `2·∏_{3 ≤ q < p_k}(q − 2) · π(p²) / φ(p_k#)`.
pub fn deleted_prime_estimate_by_totient(p: u64, p_k: u64, pi_p2: u64) -> Result<f64> {
    check_step_order(p, p_k)?;
    let columns = primes_between(3, p_k - 1)
        .into_iter()
        .fold(BigInt::from(2u32), |acc, q| acc * BigInt::from(q - 2));
    let phi = simple_sieve(p_k)
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc * BigInt::from(q - 1));
    let share = BigRational::new(columns, phi)
        .to_f64()
        .ok_or_else(|| Error::Computation(format!("share for p_k = {p_k} not representable")))?;
    Ok(share * pi_p2 as f64)
}

/// `∏_{5 ≤ q ≤ p} (q − 2)/(q − 1)` in floating point.
pub fn survivor_fraction(p: u64) -> Result<f64> {
    require_prime_at_least_5(p)?;
    let factors: Vec<f64> = primes_between(5, p)
        .into_iter()
        .map(|q| (q - 2) as f64 / (q - 1) as f64)
        .collect();
    Ok(stable_product(&factors))
}

/// Twin primes expected in `[p, p²]` with no correction:
/// `∏_{5 ≤ q ≤ p} (q − 2)/(q − 1) · π(p²)`.
pub fn survivor_estimate(p: u64, pi_p2: u64) -> Result<f64> {
    Ok(survivor_fraction(p)? * pi_p2 as f64)
}

/// Total primes below `p²` deleted by the steps `5 ≤ p_k ≤ p`:
/// `[1 − ∏_{5 ≤ q ≤ p}(1 − 1/(q − 1))] · π(p²)`.
pub fn telescoped_deletions(p: u64, pi_p2: u64) -> Result<f64> {
    require_prime_at_least_5(p)?;
    let factors: Vec<f64> = primes_between(5, p)
        .into_iter()
        .map(|q| 1.0 - 1.0 / (q - 1) as f64)
        .collect();
    Ok((1.0 - stable_product(&factors)) * pi_p2 as f64)
}

/// `∏_{q ≤ bound} q/(q − 1)` over all primes, 2 and 3 included.
pub fn coprime_density_inverse(bound: u64) -> f64 {
    let factors: Vec<f64> = simple_sieve(bound)
        .into_iter()
        .map(|q| q as f64 / (q - 1) as f64)
        .collect();
    stable_product(&factors)
}

/// The correction factor `r = π(p²)/p² · ∏ q/(q − 1)`.
///
/// ```
/// use twin_sieve::estimators::{correction_factor, ProductCutoff};
/// // π(8009²) = 3_793_117
/// let r = correction_factor(8009, 3_793_117, ProductCutoff::ThroughNextPrime).unwrap();
/// assert_eq!(format!("{r:.5}"), "0.94773");
/// ```
pub fn correction_factor(p: u64, pi_p2: u64, cutoff: ProductCutoff) -> Result<f64> {
    require_prime_at_least_5(p)?;
    let x = (p * p) as f64;
    Ok(pi_p2 as f64 / x * coprime_density_inverse(cutoff.bound(p)))
}

/// `∏_{3 ≤ q ≤ bound} q(q − 2)/(q − 1)²`, the twin-prime product.
pub fn twin_product(bound: u64) -> f64 {
    let factors: Vec<f64> = simple_sieve(bound)
        .into_iter()
        .filter(|&q| q >= 3)
        .map(|q| {
            let qf = q as f64;
            qf * (qf - 2.0) / ((qf - 1.0) * (qf - 1.0))
        })
        .collect();
    stable_product(&factors)
}

/// The corrected estimate `π(x)²/x · 4·∏_{3 ≤ q ≤ p} q(q − 2)/(q − 1)²`
/// with `x = p²`, times `p'/(p' − 1)` under
/// [`ProductCutoff::ThroughNextPrime`].
///
/// Equal to `correction_factor · survivor_estimate`; this function takes
/// the direct product route.
pub fn corrected_estimate(p: u64, pi_p2: u64, cutoff: ProductCutoff) -> Result<f64> {
    require_prime_at_least_5(p)?;
    let x = (p * p) as f64;
    let pi = pi_p2 as f64;
    let extra = match cutoff {
        ProductCutoff::ThroughP => 1.0,
        ProductCutoff::ThroughNextPrime => {
            let n = next_prime(p) as f64;
            n / (n - 1.0)
        }
    };
    Ok(pi * pi / x * 4.0 * twin_product(p) * extra)
}

/// `4x / ln²x · ∏_{3 ≤ q ≤ product_bound} q(q − 2)/(q − 1)²`.
pub fn asymptotic_estimate(x: f64, product_bound: u64) -> Result<f64> {
    if x.is_nan() || x <= std::f64::consts::E * std::f64::consts::E {
        return Err(Error::Argument(format!("x = {x} must exceed e²")));
    }
    if product_bound < 3 {
        return Err(Error::Argument(format!(
            "product bound {product_bound} must be at least 3"
        )));
    }
    let l = x.ln();
    Ok(4.0 * x / (l * l) * twin_product(product_bound))
}

/// `∏_{q ≤ p}(q − 1)/q · ln(p²) / (2e^{−γ})`, which tends to 1.
pub fn mertens_ratio(p: u64) -> Result<f64> {
    require_prime_at_least_5(p)?;
    let product = 1.0 / coprime_density_inverse(p);
    let x = (p as f64) * (p as f64);
    Ok(product * x.ln() / (2.0 * (-EULER_GAMMA).exp()))
}

/// Reference constants: `γ`, `e^γ/2` and truncations of the twin-prime
/// product.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    pub euler_gamma: f64,
    pub half_e_gamma: f64,
    pub twin_product_truncations: BTreeMap<u64, f64>,
}

impl Constants {
    pub fn new(bounds: &[u64]) -> Self {
        Constants {
            euler_gamma: EULER_GAMMA,
            half_e_gamma: half_e_gamma(),
            twin_product_truncations: bounds.iter().map(|&b| (b, twin_product(b))).collect(),
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::new(&[10, 100, 1_000, 10_000, 100_000, 1_000_000])
    }
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub p: u64,
    /// Counted twin primes in `[p, p²]`.
    pub actual: u64,
    pub pi_p2: u64,
    pub survivor: f64,
    pub r: f64,
    pub corrected: f64,
}

impl EstimateRow {
    /// Computes the estimate columns for `p` from an exact `π(p²)`.
    pub fn compute(p: u64, actual: u64, pi_p2: u64, cutoff: ProductCutoff) -> Result<Self> {
        Ok(EstimateRow {
            p,
            actual,
            pi_p2,
            survivor: survivor_estimate(p, pi_p2)?,
            r: correction_factor(p, pi_p2, cutoff)?,
            corrected: corrected_estimate(p, pi_p2, cutoff)?,
        })
    }

    pub fn survivor_rounded(&self, mode: RoundingMode) -> i64 {
        mode.apply(self.survivor)
    }

    pub fn corrected_rounded(&self, mode: RoundingMode) -> i64 {
        mode.apply(self.corrected)
    }

    /// `r` to five decimals, as printed.
    pub fn r_display(&self) -> String {
        format!("{:.5}", round_decimals(self.r, 5))
    }
}

/// Whether `a` and `b` agree to relative tolerance `tol`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// `Σ_{5 ≤ p_k ≤ p} deleted + survivors` as an exact rational multiple of
/// `π(p²)`; the telescoping argument says it is exactly 1.
pub fn telescoping_sum_exact(p: u64) -> Result<BigRational> {
    require_prime_at_least_5(p)?;
    let mut total = BigRational::zero();
    for p_k in primes_between(5, p) {
        total += deleted_fraction_exact(p_k)?;
    }
    Ok(total + survivor_fraction_exact(p)?)
}
