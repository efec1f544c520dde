//! The random-walk route: f_D(u) = u int t J0(ut) prod J0(r_m t) dt,
//! F_D(u) = u int J1(ut) prod J0(r_m t) dt and m = int log(u) f_D(u) du.
//!
//! The t-integral runs over fixed Gauss panels up to a cutoff T; beyond T
//! every Bessel factor is replaced by its two-term Hankel form and the
//! resulting sum of t^{-s} e^{iwt} pieces is integrated exactly with E_s.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::expint::expint;
use super::{walk_radii, Method, OracleParams, OracleResult};
use crate::bessel::{j0, j1};
use crate::linform::LinearForm;
use crate::quad::GaussLegendre;
use crate::Error;

/// Cutoff in units of the shortest step.
const BASE_CUTOFF: f64 = 400.0;
/// Minimum u*T so the Hankel form is accurate for the u factor too.
const U_CUTOFF: f64 = 60.0;
/// Largest cutoff, in units of the base cutoff. Below u0 = U_CUTOFF / T_max
/// the density is replaced by the model u (A + B log u).
const CUTOFF_CAP: f64 = 8.0;
/// Graded mesh: ratio and depth relative to the support length.
const GRADE: f64 = 0.25;
const GRADE_DEPTH: f64 = 1e-12;
/// Above this many steps the sign-pattern expansion is skipped.
const MAX_PATTERN_STEPS: usize = 16;

struct Kernel {
    radii: Vec<f64>,
    h: f64,
    gl: GaussLegendre,
    t: Vec<f64>,
    wphi: Vec<f64>,
}

impl Kernel {
    fn new(form: &LinearForm) -> Result<Self, Error> {
        if form.nonzero_count() < 4 {
            return Err(Error::CertificateUnavailable(format!(
                "the Bessel-product integral needs 4 nonzero moduli, got {}",
                form.nonzero_count()
            )));
        }
        Ok(Kernel {
            radii: walk_radii(form),
            h: core::f64::consts::PI / form.c_f64(),
            gl: GaussLegendre::new(16),
            t: Vec::new(),
            wphi: Vec::new(),
        })
    }

    fn r_min(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    fn base_cutoff(&self) -> f64 {
        BASE_CUTOFF / self.r_min()
    }

    fn floor(&self) -> f64 {
        U_CUTOFF / (CUTOFF_CAP * self.base_cutoff())
    }

    fn panels(&self, u: f64) -> usize {
        let t = self
            .base_cutoff()
            .max(U_CUTOFF / u)
            .min(CUTOFF_CAP * self.base_cutoff());
        libm::ceil(t / self.h) as usize
    }

    fn ensure(&mut self, panels: usize) {
        let have = self.t.len() / self.gl.len();
        for p in have..panels {
            let a = p as f64 * self.h;
            let nodes: Vec<(f64, f64)> = self.gl.mapped(a, a + self.h).collect();
            for (t, w) in nodes {
                let phi = self.radii.iter().fold(w, |acc, &r| acc * j0(r * t));
                self.t.push(t);
                self.wphi.push(phi);
            }
        }
    }

    /// int_0^inf t^a J_nu(ut) prod J0(r t) dt for (a, nu) = (1, 0) or (0, 1).
    fn integral(&mut self, u: f64, nu: u32) -> f64 {
        let panels = self.panels(u);
        self.ensure(panels);
        let n = panels * self.gl.len();
        let body: f64 = if nu == 0 {
            self.t[..n]
                .iter()
                .zip(&self.wphi[..n])
                .map(|(&t, &w)| w * t * j0(u * t))
                .sum()
        } else {
            self.t[..n]
                .iter()
                .zip(&self.wphi[..n])
                .map(|(&t, &w)| w * j1(u * t))
                .sum()
        };
        let cut = panels as f64 * self.h;
        body + hankel_tail(&self.radii, u, nu, cut)
    }

    fn density(&mut self, u: f64) -> f64 {
        u * self.integral(u, 0)
    }

    fn cdf(&mut self, u: f64) -> f64 {
        u * self.integral(u, 1)
    }
}

/// int_T^inf t^a J_nu(ut) prod_m J0(r_m t) dt from the Hankel forms
/// J_nu(x) ~ sqrt(2/(pi x)) Re[e^{i(x - phase)} (1 + i q/x)], a = 1 - nu.
fn hankel_tail(radii: &[f64], u: f64, nu: u32, cut: f64) -> f64 {
    let pi = core::f64::consts::PI;
    let mut rho: Vec<(f64, f64, f64)> = radii.iter().map(|&r| (r, pi / 4.0, -0.125)).collect();
    rho.push(if nu == 0 {
        (u, pi / 4.0, -0.125)
    } else {
        (u, 0.75 * pi, 0.375)
    });
    if rho.len() > MAX_PATTERN_STEPS {
        return 0.0;
    }
    let k = rho.len();
    let a = if nu == 0 { 1.0 } else { 0.0 };
    let s = k as f64 / 2.0 - a;
    let pref = rho
        .iter()
        .fold(1.0, |acc, &(r, _, _)| acc * libm::sqrt(2.0 / (pi * r)));
    let mut total = Complex64::new(0.0, 0.0);
    // the first sign is fixed to +; the mirrored pattern is the conjugate
    for mask in 0..(1u32 << (k - 1)) {
        let (mut omega, mut phase, mut beta) = (0.0, 0.0, 0.0);
        for (i, &(r, ph, q)) in rho.iter().enumerate() {
            let sg = if i > 0 && mask & (1 << (i - 1)) != 0 {
                -1.0
            } else {
                1.0
            };
            omega += sg * r;
            phase += sg * ph;
            beta += sg * q / r;
        }
        let z = Complex64::new(0.0, -omega * cut);
        let i0 = expint(s, z) * libm::pow(cut, 1.0 - s);
        let i1 = expint(s + 1.0, z) * libm::pow(cut, -s);
        let rot = Complex64::from_polar(1.0, -phase);
        total += rot * (i0 + Complex64::new(0.0, beta) * i1);
    }
    pref * 2.0 * total.re / libm::pow(2.0, k as f64)
}

pub fn walk_density(form: &LinearForm, u: f64) -> Result<f64, Error> {
    let mut k = Kernel::new(form)?;
    if u <= 0.0 || u >= form.d_f64() {
        return Ok(0.0);
    }
    Ok(k.density(u))
}

pub fn walk_cdf(form: &LinearForm, u: f64) -> Result<f64, Error> {
    let mut k = Kernel::new(form)?;
    if u <= 0.0 {
        return Ok(0.0);
    }
    if u >= form.d_f64() {
        return Ok(1.0);
    }
    Ok(k.cdf(u))
}

/// Points where the density is not smooth: |sum of signed moduli| in [0, d].
fn singular_points(radii: &[f64], d: f64) -> Vec<f64> {
    let mut pts = alloc::vec![0.0, d];
    if radii.len() <= MAX_PATTERN_STEPS {
        for mask in 0..(1u32 << (radii.len() - 1)) {
            let s: f64 = radii
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    if i > 0 && mask & (1 << (i - 1)) != 0 {
                        -r
                    } else {
                        r
                    }
                })
                .sum();
            pts.push(s.abs());
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * d);
    pts
}

/// Subintervals of [a, b] refined geometrically towards both ends.
fn graded(a: f64, b: f64, d: f64, out: &mut Vec<(f64, f64)>) {
    let half = 0.5 * (b - a);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut len = half;
    while len > GRADE_DEPTH * d {
        let next = len * GRADE;
        left.push((a + next, a + len));
        right.push((b - len, b - next));
        len = next;
    }
    left.push((a, a + len));
    right.push((b - len, b));
    out.extend(left.into_iter().rev());
    out.extend(right);
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub oracle: OracleResult,
    /// int_0^d f_D(u) du.
    pub normalization: f64,
}

/// m(P_D) = int_0^d log(u) f_D(u) du on a mesh graded towards the singular
/// points. Near 0 the 2D density f_D(u)/u behaves like A + B log u (B != 0
/// when some signed sum of the moduli vanishes); that model is fitted at u0
/// and 2 u0 and integrated exactly on [0, u0].
pub fn mahler_via_density(form: &LinearForm) -> Result<DensityReport, Error> {
    let mut k = Kernel::new(form)?;
    let d = form.d_f64();
    let u0 = k.floor().min(0.25 * d);
    let pts = singular_points(&k.radii, d);
    let mut cells = Vec::new();
    for w in pts.windows(2) {
        graded(w[0], w[1], d, &mut cells);
    }
    let coarse = GaussLegendre::new(8);
    let fine = GaussLegendre::new(16);
    let (mut m16, mut m8, mut n16) = (0.0, 0.0, 0.0);
    for &(a, b) in &cells {
        if b <= u0 {
            continue;
        }
        let a = a.max(u0);
        for (u, w) in fine.mapped(a, b) {
            let f = k.density(u);
            m16 += w * libm::log(u) * f;
            n16 += w * f;
        }
        for (u, w) in coarse.mapped(a, b) {
            m8 += w * libm::log(u) * k.density(u);
        }
    }
    let p1 = k.density(u0) / u0;
    let p2 = k.density(2.0 * u0) / (2.0 * u0);
    let b = (p2 - p1) / core::f64::consts::LN_2;
    let lu = libm::log(u0);
    let a = p1 - b * lu;
    let sq = u0 * u0;
    // int_0^u0 u log^j(u) du for j = 0, 1, 2
    let (i0, i1) = (sq / 2.0, sq / 2.0 * lu - sq / 4.0);
    let i2 = sq / 2.0 * lu * lu - sq / 2.0 * lu + sq / 4.0;
    let below_n = a * i0 + b * i1;
    let below_m = a * i1 + b * i2;
    let value = m16 + below_m;
    let normalization = n16 + below_n;
    let err = (m16 - m8).abs() + (normalization - 1.0).abs() * (libm::log(d).abs() + 1.0);
    Ok(DensityReport {
        oracle: OracleResult {
            value,
            method: Method::Density,
            error_estimate: err,
            params: OracleParams {
                cutoff: Some(k.base_cutoff()),
                normalization: Some(normalization),
                ..Default::default()
            },
        },
        normalization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(s: &str) -> LinearForm {
        LinearForm::parse(s).unwrap()
    }

    #[test]
    fn cdf_clamps() {
        let f = form("1,2,2,3");
        assert_eq!(walk_cdf(&f, 8.5).unwrap(), 1.0);
        assert_eq!(walk_cdf(&f, 0.0).unwrap(), 0.0);
        assert_eq!(walk_density(&f, 9.0).unwrap(), 0.0);
        assert!(walk_density(&form("1,1,1"), 1.0).is_err());
    }

    #[test]
    fn all_ones_reference() {
        let r = mahler_via_density(&form("1,1,1,1")).unwrap();
        assert!((r.normalization - 1.0).abs() < 1e-6, "{}", r.normalization);
        let r = r.oracle;
        assert!((r.value - 0.4262783988).abs() < 1e-3, "{r:?}");
        assert!(r.error_estimate < 1e-3);
    }

    #[test]
    fn cdf_matches_density() {
        // F(b) - F(a) against the integral of f over [a, b]
        let f = form("1,2,2,3");
        let gl = GaussLegendre::new(16);
        let (a, b) = (2.3, 3.1);
        let mut k = Kernel::new(&f).unwrap();
        let integral = gl.integrate(a, b, |u| k.density(u));
        let diff = walk_cdf(&f, b).unwrap() - walk_cdf(&f, a).unwrap();
        assert!((integral - diff).abs() < 1e-7, "{integral} {diff}");
    }

    #[test]
    fn tail_is_small_and_oscillatory() {
        let f = form("1,1,1,1");
        let k = Kernel::new(&f).unwrap();
        let t = hankel_tail(&k.radii, 1.3, 0, 400.0);
        assert!(t.abs() < 1e-3);
    }
}
