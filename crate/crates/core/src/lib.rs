//! Twin primes through a double sieve.
//!
//! Sieving every multiple of a prime *and* every number two away from such a
//! multiple (on the correct side) leaves exactly the twin-prime candidates.
//! Carried out prime by prime this produces the residue wheels
//! [`TwinWheel`]; counting which primes each step removes gives
//! [`DeletionLedger`], and turning the per-step densities into products
//! over primes gives the estimators in [`estimators`].
//!
//! ```
//! use twin_sieve::{initial_wheel, sieve_primes};
//!
//! let w = initial_wheel().advance().unwrap();
//! assert_eq!(w.period(), 210);
//! assert_eq!(w.headers(), vec![11, 13, 17, 19, 29, 31]);
//!
//! let table = sieve_primes(101 * 101 + 2).unwrap();
//! assert_eq!(table.count_primes_up_to(101 * 101).unwrap(), 1252);
//! ```

pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod primes;
pub mod wheel;

pub use error::{Error, Result};
pub use estimators::{
    asymptotic_estimate, corrected_estimate, correction_factor, survivor_estimate, twin_product,
    EstimateRow, ProductCutoff, RoundingMode,
};
pub use experiments::{
    build_table4, count_actual_twins, figure1_series, reproduce_table4, Boundary, CountingMode,
    TableConfig, TableReport,
};
pub use primes::{sieve_primes, PrimeTable, SieveConfig};
pub use wheel::{
    advance, deletion_step_of, exact_deletion_ledger, initial_wheel, twin_of, wheel_members_below,
    DeletionLedger, DeletionStep, TwinWheel,
};

// The guide's code blocks run as doctests so they cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/primes.md")]
    mod primes {}
    #[doc = include_str!("../../../book/src/wheels.md")]
    mod wheels {}
    #[doc = include_str!("../../../book/src/ledger.md")]
    mod ledger {}
    #[doc = include_str!("../../../book/src/estimates.md")]
    mod estimates {}
    #[doc = include_str!("../../../book/src/reproduction.md")]
    mod reproduction {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
