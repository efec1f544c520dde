//! Point values of 2 log|P_D(z)| from the series in the Fubini-Study
//! quantity x = |P_D(z)|^2 / (||z||^2 ||D||^2), and the Legendre/Jacobi
//! evaluators those series need.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linform::{Coefficient, LinearForm};
use crate::Error;

/// A point of projective space given by homogeneous coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint {
    coords: Vec<Complex64>,
    normsq: f64,
}

impl ProjPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self, Error> {
        if coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        let normsq: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
        if normsq == 0.0 {
            return Err(Error::AllZero);
        }
        Ok(ProjPoint { coords, normsq })
    }

    /// Comma separated coordinates in the coefficient syntax.
    pub fn parse(text: &str) -> Result<Self, Error> {
        if text.trim().is_empty() {
            return Err(Error::EmptyInput);
        }
        let coords = text
            .split(',')
            .enumerate()
            .map(|(index, tok)| {
                Coefficient::parse(tok, 64)
                    .map(|c| Complex64::new(c.re.to_f64(), c.im.to_f64()))
                    .ok_or_else(|| Error::MalformedToken {
                        index,
                        token: tok.into(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(coords)
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn normsq(&self) -> f64 {
        self.normsq
    }
}

fn coefficients(form: &LinearForm) -> Vec<Complex64> {
    form.complex_f64()
        .into_iter()
        .map(|(re, im)| Complex64::new(re, im))
        .collect()
}

fn pairing(z: &ProjPoint, form: &LinearForm) -> Result<Complex64, Error> {
    if z.coords.len() != form.n() + 1 {
        return Err(Error::DimensionMismatch {
            expected: form.n() + 1,
            got: z.coords.len(),
        });
    }
    Ok(coefficients(form).iter().zip(&z.coords).map(|(w, c)| w * c).sum())
}

/// cos^2 of the Fubini-Study distance between z and conj(D).
pub fn fs_cos2(z: &ProjPoint, form: &LinearForm) -> Result<f64, Error> {
    let p = pairing(z, form)?;
    let x = p.norm_sqr() / (z.normsq * form.l2sq().to_f64());
    Ok(x.min(1.0))
}

/// 2 log|P_D(z)| evaluated directly.
pub fn log_abs_sq(z: &ProjPoint, form: &LinearForm) -> Result<f64, Error> {
    Ok(libm::log(pairing(z, form)?.norm_sqr()))
}

/// Legendre polynomial P_j(x).
pub fn legendre(j: usize, x: f64) -> f64 {
    jacobi(j, 0, x)
}

/// Jacobi polynomial P_j^{(alpha, 0)}(x) by the three-term recurrence.
pub fn jacobi(j: usize, alpha: u32, x: f64) -> f64 {
    JacobiSeq::new(alpha, x).nth(j).unwrap()
}

/// P_0, P_1, ... of the family P^{(alpha, 0)} at a fixed point.
struct JacobiSeq {
    a: f64,
    x: f64,
    n: usize,
    prev: f64,
    cur: f64,
}

impl JacobiSeq {
    fn new(alpha: u32, x: f64) -> Self {
        JacobiSeq {
            a: alpha as f64,
            x,
            n: 0,
            prev: 0.0,
            cur: 1.0,
        }
    }
}

impl Iterator for JacobiSeq {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let (a, x) = (self.a, self.x);
        let next = if self.n == 0 {
            0.5 * a + 0.5 * (a + 2.0) * x
        } else {
            let n = (self.n + 1) as f64;
            let s = 2.0 * n + a;
            let c1 = 2.0 * n * (n + a) * (s - 2.0);
            let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a);
            let c3 = 2.0 * (n + a - 1.0) * (n - 1.0) * s;
            (c2 * self.cur - c3 * self.prev) / c1
        };
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LognormValue {
    /// Estimate of 2 log|P_D(z)|.
    pub value: f64,
    pub x: f64,
    pub terms: usize,
    /// Remainder bound; rigorous for the hypergeometric form, diagnostic for
    /// the Jacobi form.
    pub tail: f64,
}

fn base(z: &ProjPoint, form: &LinearForm) -> Result<(f64, f64), Error> {
    let x = fs_cos2(z, form)?;
    let offset = libm::log(z.normsq) + libm::log(form.l2sq().to_f64());
    Ok((x, offset))
}

/// rho(z) + log||D||^2 - sum_{j<=N} (1-x)^j / j.
pub fn lognorm_hyper(z: &ProjPoint, form: &LinearForm, n_terms: usize) -> Result<LognormValue, Error> {
    let (x, offset) = base(z, form)?;
    if x <= 0.0 {
        return Err(Error::InvalidArgument("point lies on the divisor of P_D".into()));
    }
    let y = 1.0 - x;
    let mut pow = 1.0;
    let mut sum = 0.0;
    for j in 1..=n_terms {
        pow *= y;
        sum += pow / j as f64;
    }
    let n1 = (n_terms + 1) as f64;
    let tail = libm::pow(y, n1) / (n1 * x);
    Ok(LognormValue {
        value: offset - sum,
        x,
        terms: n_terms,
        tail,
    })
}

/// rho(z) + log||D||^2 - H_l - sum_{j<=N} (2j+l)(-1)^j / (j(j+l)) P_j^{(l-1,0)}(2x-1).
pub fn lognorm_jacobi(
    z: &ProjPoint,
    form: &LinearForm,
    ell: u32,
    n_terms: usize,
) -> Result<LognormValue, Error> {
    if ell == 0 {
        return Err(Error::InvalidArgument("the Jacobi form needs l >= 1".into()));
    }
    let (x, offset) = base(z, form)?;
    if x <= 0.0 || x >= 1.0 {
        return Err(Error::InvalidArgument("the Jacobi form needs 0 < x < 1".into()));
    }
    let y = 2.0 * x - 1.0;
    let a = (ell - 1) as f64;
    let l = ell as f64;
    let h: f64 = (1..=ell).map(|k| 1.0 / k as f64).sum();
    let mut sum = 0.0;
    for (j, p) in JacobiSeq::new(ell - 1, y).enumerate().take(n_terms + 1).skip(1) {
        let jf = j as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += (2.0 * jf + l) * sign / (jf * (jf + l)) * p;
    }
    // |P_j| <= 12 (2j+l)^{-1/2} / W gives |term_j| <= 12 sqrt 2 j^{-3/2} / W
    let w = libm::pow(1.0 - y * y, 0.25) * libm::pow((1.0 - y) / 2.0, a / 2.0);
    let tail = 12.0 / w * 2.0 * core::f64::consts::SQRT_2 / libm::sqrt(n_terms.max(1) as f64);
    Ok(LognormValue {
        value: offset - h - sum,
        x,
        terms: n_terms,
        tail,
    })
}
