use alloc::format;
use alloc::vec::Vec;

use super::{walk_radii, Method, OracleParams, OracleResult};
use crate::linform::LinearForm;
use crate::Error;

/// Default cap on points per angle.
pub const DEFAULT_GRID_CAP: usize = 4096;
const MAX_GRID_POINTS: u64 = 1 << 26;
const TOL: f64 = 1e-10;

/// Trapezoid mean over the remaining angles after integrating the largest
/// modulus in closed form: mean of log max(|A|, r_0), A = r_1 + sum r_k e^{it_k}.
fn grid_mean(r: &[f64], m: usize) -> f64 {
    let table: Vec<(f64, f64)> = (0..m)
        .map(|j| libm::sincos(2.0 * core::f64::consts::PI * j as f64 / m as f64))
        .map(|(s, c)| (c, s))
        .collect();
    let piv2 = r[0] * r[0];
    let steps = &r[2..];
    let total = level_sum(steps, &table, r[1], 0.0, piv2);
    total / libm::pow(m as f64, steps.len() as f64)
}

fn level_sum(steps: &[f64], table: &[(f64, f64)], re: f64, im: f64, piv2: f64) -> f64 {
    match steps {
        [] => 0.5 * libm::log((re * re + im * im).max(piv2)),
        [r] => {
            table
                .iter()
                .map(|&(c, s)| {
                    let (x, y) = (re + r * c, im + r * s);
                    libm::log((x * x + y * y).max(piv2))
                })
                .sum::<f64>()
                * 0.5
        }
        [r, rest @ ..] => table
            .iter()
            .map(|&(c, s)| level_sum(rest, table, re + r * c, im + r * s, piv2))
            .sum(),
    }
}

/// Torus quadrature, doubling the grid from 16 points per angle up to `max_points`.
pub fn mahler_jensen_quadrature(form: &LinearForm, max_points: usize) -> Result<OracleResult, Error> {
    let r = walk_radii(form);
    let exact = |v: f64| OracleResult {
        value: v,
        method: Method::JensenQuadrature,
        error_estimate: 0.0,
        params: OracleParams {
            grid: Some(1),
            ..Default::default()
        },
    };
    if r.len() <= 2 {
        return Ok(exact(libm::log(r[0])));
    }
    let dims = r.len() - 2;
    if dims > 3 {
        return Err(Error::InvalidArgument(format!(
            "{} torus dimensions left after the closed-form step; use the montecarlo oracle",
            dims
        )));
    }
    let mut m = 16usize;
    let mut prev = grid_mean(&r, m);
    let mut diff = f64::INFINITY;
    loop {
        let next = m * 2;
        if next > max_points || (next as u64).pow(dims as u32) > MAX_GRID_POINTS {
            break;
        }
        let v = grid_mean(&r, next);
        diff = (v - prev).abs();
        prev = v;
        m = next;
        if diff < TOL {
            break;
        }
    }
    Ok(OracleResult {
        value: prev,
        method: Method::JensenQuadrature,
        error_estimate: diff,
        params: OracleParams {
            grid: Some(m),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable_is_exact() {
        let f = LinearForm::parse("2,1").unwrap();
        let r = mahler_jensen_quadrature(&f, 64).unwrap();
        assert_eq!(r.value, libm::log(2.0));
        assert_eq!(r.error_estimate, 0.0);
        let g = LinearForm::parse("0,3,0").unwrap();
        assert_eq!(mahler_jensen_quadrature(&g, 64).unwrap().value, libm::log(3.0));
    }

    #[test]
    fn smyth_three_ones() {
        let f = LinearForm::parse("1,1,1").unwrap();
        let r = mahler_jensen_quadrature(&f, DEFAULT_GRID_CAP).unwrap();
        assert!((r.value - 0.3230659472).abs() < 1e-5, "{}", r.value);
        assert!(r.error_estimate < 1e-5);
    }

    #[test]
    fn permutation_and_phase_are_exact() {
        let a = mahler_jensen_quadrature(&LinearForm::parse("1,2,2,3").unwrap(), 256).unwrap();
        let b = mahler_jensen_quadrature(&LinearForm::parse("3,2i,-1,2").unwrap(), 256).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn too_many_dimensions() {
        let f = LinearForm::parse("1,1,1,1,1,1").unwrap();
        assert!(matches!(
            mahler_jensen_quadrature(&f, 64),
            Err(Error::InvalidArgument(_))
        ));
    }
}
