//! Independent evaluations of m(P_D) used to check the series.
//!
//! All three depend on the coefficient moduli only: m(P_D) is the mean of
//! log|r_0 + r_1 e^{i t_1} + ... | over the torus, i.e. E log|X| for a planar
//! random walk with step lengths r_m.

mod density;
mod expint;
mod jensen;
mod montecarlo;

use alloc::vec::Vec;
use core::fmt;

use crate::linform::LinearForm;

pub use density::{mahler_via_density, walk_cdf, walk_density, DensityReport};
pub use expint::expint;
pub use jensen::{mahler_jensen_quadrature, DEFAULT_GRID_CAP};
#[cfg(feature = "std")]
pub use montecarlo::mahler_montecarlo_threaded;
pub use montecarlo::{mahler_montecarlo, montecarlo_chunk, montecarlo_reduce, McPartial, MC_CHUNK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    JensenQuadrature,
    MonteCarlo,
    Density,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::JensenQuadrature => "jensen_quadrature",
            Method::MonteCarlo => "montecarlo",
            Method::Density => "density",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleParams {
    /// Final points per angle.
    pub grid: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Base cutoff of the oscillatory Bessel integrals.
    pub cutoff: Option<f64>,
    /// Numerical integral of the density over its support.
    pub normalization: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
    pub params: OracleParams,
}

/// Nonzero moduli, largest first.
pub(crate) fn walk_radii(form: &LinearForm) -> Vec<f64> {
    form.nonzero_moduli()
}

/// log||D|| - gamma/2 - 2 <= m <= log||D||.
pub fn check_rvtv_bounds(form: &LinearForm, m_value: f64) -> bool {
    let hi = libm::log(form.norm_f64());
    let lo = hi - 0.5 * EULER_GAMMA - 2.0;
    lo <= m_value && m_value <= hi
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sandwich() {
        let f = LinearForm::parse("1,1,1,1").unwrap();
        assert!(check_rvtv_bounds(&f, 0.42628));
        assert!(!check_rvtv_bounds(&f, 2f64.ln() + 1.0));
        assert!(!check_rvtv_bounds(&f, -1.6));
        assert!(check_rvtv_bounds(&f, -1.59));
        let g = LinearForm::parse("1,1,1").unwrap();
        assert!(check_rvtv_bounds(&g, 0.32307));
        let h = LinearForm::parse("1,2,2,3").unwrap();
        assert!(!check_rvtv_bounds(&h, libm::log(h.norm_f64()) + 1.0));
    }
}
