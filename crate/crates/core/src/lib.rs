//! Logarithmic Mahler measure of linear forms `W0 Z0 + ... + Wn Zn`.
//!
//! The measure is evaluated from convergent series in the squared multinomial
//! moments of the coefficient moduli, with explicit truncation bounds, and
//! checked against direct torus quadrature, Monte Carlo sampling and a
//! random-walk density integral.
#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod bessel;
pub mod bounds;
mod error;
pub mod linform;
pub mod lognorm;
pub mod moments;
pub mod numerics;
pub mod oracle;
mod quad;
pub mod series;

pub use error::Error;
pub use linform::{Coefficient, Eligibility, LinearForm, Scalar};
pub use moments::{moment_bruteforce, moment_table, walk_moment, MomentTable};
pub use numerics::BigReal;
pub use series::{mahler_estimate, SeriesResult, Variant};
