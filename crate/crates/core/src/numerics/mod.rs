//! Extended precision scalars and reference constants.

mod bigreal;
mod constants;

pub use bigreal::{sum_in_order, BigReal};
pub use constants::{constant, constant_by_name, harmonic, Constant};

pub(crate) use bigreal::parse_decimal_ratio;

/// Working precision used when a caller does not ask for one.
pub const DEFAULT_PRECISION: u32 = 256;
