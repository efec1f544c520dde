//! Truncation bounds: the constant G(n,D), the factor A(D,l) and the tails.
//!
//! G(n,D) = c^2 int_0^inf t max(1, pi c t/2)^(-1/2) prod_m |J0(r_m t)| dt.
//! Replacing every |J0(r t)| by max(1, pi r t/2)^(-1/2) gives an integrand that
//! is a pure power of t between consecutive breakpoints 2/(pi f).

use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::bessel::j0;
use crate::linform::LinearForm;
use crate::numerics::{constant, BigReal, Constant};
use crate::quad::GaussLegendre;
use crate::series::Variant;
use crate::Error;

const PREC: u32 = 192;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailVariant {
    E1,
    E2,
    SEll(u32),
}

impl From<Variant> for TailVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::E1 => TailVariant::E1,
            Variant::SEll(1) => TailVariant::E2,
            Variant::SEll(l) => TailVariant::SEll(l),
        }
    }
}

fn require_four(form: &LinearForm) -> Result<(), Error> {
    if form.nonzero_count() < 4 {
        return Err(Error::CertificateUnavailable(alloc::format!(
            "G diverges with {} nonzero coefficients (needs 4)",
            form.nonzero_count()
        )));
    }
    Ok(())
}

/// Breakpoints 2/(pi c) then 2/(pi r_m) for nonzero r_m in descending order.
pub fn breakpoints(form: &LinearForm) -> Vec<f64> {
    let pi = core::f64::consts::PI;
    let mut out = alloc::vec![2.0 / (pi * form.c_f64())];
    out.extend(form.nonzero_moduli().iter().map(|r| 2.0 / (pi * r)));
    out
}

fn factors_big(form: &LinearForm, p: u32) -> Vec<BigReal> {
    let mut f = alloc::vec![form.csq().to_big_real(p).sqrt()];
    let mut r: Vec<BigReal> = form
        .weights_big(p)
        .into_iter()
        .filter(|w| !w.is_zero())
        .map(|w| w.sqrt())
        .collect();
    r.sort_by(|a, b| b.cmp(a));
    f.extend(r);
    f
}

/// t^(e/2) for integer e.
fn half_power(t: &BigReal, e: i64) -> BigReal {
    let s = t.sqrt().powi(e.unsigned_abs());
    if e < 0 {
        s.recip()
    } else {
        s
    }
}

/// Integral of the envelope over [lower, inf) in extended precision.
fn envelope_tail_big(form: &LinearForm, lower: &BigReal, p: u32) -> BigReal {
    let f = factors_big(form, p);
    let pi = constant(Constant::Pi, p);
    let b: Vec<BigReal> = f.iter().map(|x| (&pi * x).recip().ldexp(1)).collect();
    let csq = form.csq().to_big_real(p);
    let k = b.len();
    let mut total = BigReal::zero(p);
    let mut pref = BigReal::one(p);
    for z in 0..=k {
        // z factors active on [b_{z-1}, b_z]
        if z > 0 {
            pref = &pref * &b[z - 1].sqrt();
        }
        let alpha = if z == 0 {
            BigReal::zero(p)
        } else {
            b[z - 1].clone()
        };
        let alpha = if alpha < *lower { lower.clone() } else { alpha };
        let beta = b.get(z);
        if let Some(beta) = beta {
            if *beta <= alpha {
                continue;
            }
        }
        let e2 = 4 - z as i64; // twice the exponent of the antiderivative
        let piece = match beta {
            Some(beta) => {
                if e2 == 0 {
                    (beta / &alpha).ln()
                } else {
                    let hb = half_power(beta, e2);
                    let ha = if alpha.is_zero() {
                        BigReal::zero(p)
                    } else {
                        half_power(&alpha, e2)
                    };
                    (&(&hb - &ha) * &BigReal::from_i64(2, p)).div_int(&BigInt::from(e2))
                }
            }
            None => {
                assert!(e2 < 0, "envelope integral diverges");
                (&half_power(&alpha, e2) * &BigReal::from_i64(2, p)).div_int(&BigInt::from(-e2))
            }
        };
        total = &total + &(&pref * &piece);
    }
    &total * &csq
}

fn round_up(x: &BigReal) -> f64 {
    // absorbs the working-precision error before the directed rounding
    let bumped = x + &x.abs().ldexp(-100);
    bumped.to_f64_up()
}

/// Closed-form upper bound for G(n,D).
pub fn g_elementary(form: &LinearForm) -> Result<f64, Error> {
    require_four(form)?;
    Ok(round_up(&envelope_tail_big(form, &BigReal::zero(PREC), PREC)))
}

/// Envelope integral over [t, inf).
pub fn envelope_tail(form: &LinearForm, t: f64) -> Result<f64, Error> {
    require_four(form)?;
    Ok(round_up(&envelope_tail_big(
        form,
        &BigReal::from_f64(t, PREC),
        PREC,
    )))
}

/// The G integral evaluated numerically.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureG {
    /// Panel sum plus the envelope tail: an upper estimate.
    pub value: f64,
    /// The envelope tail added beyond the cutoff.
    pub tail_slack: f64,
    pub cutoff: f64,
}

/// Panels per unit of c*t / pi; the cutoff is capped at this many panels.
const G_PANEL_CAP: usize = 40_000;
const G_TAIL_TARGET: f64 = 1e-9;

pub fn g_quadrature(form: &LinearForm) -> Result<QuadratureG, Error> {
    require_four(form)?;
    let c = form.c_f64();
    let radii = form.nonzero_moduli();
    let h0 = core::f64::consts::PI / (2.0 * c);
    // smallest cutoff (in panels) whose tail meets the target, if affordable
    let mut panels = 64usize;
    while panels < G_PANEL_CAP {
        let t = panels as f64 * h0;
        if envelope_tail(form, t)? < G_TAIL_TARGET {
            break;
        }
        panels *= 2;
    }
    let panels = panels.min(G_PANEL_CAP);
    let cutoff = panels as f64 * h0;
    let kink = 2.0 / (core::f64::consts::PI * c);
    let gl = GaussLegendre::new(16);
    let integrand = |t: f64| {
        let env = if t <= kink { 1.0 } else { libm::sqrt(kink / t) };
        radii
            .iter()
            .fold(c * c * t * env, |acc, &r| acc * j0(r * t).abs())
    };
    let mut sum = gl.integrate(0.0, kink, integrand);
    let h = (cutoff - kink) / panels as f64;
    for i in 0..panels {
        let a = kink + i as f64 * h;
        sum += gl.integrate(a, a + h, integrand);
    }
    let tail = envelope_tail(form, cutoff)?;
    Ok(QuadratureG {
        value: sum + tail,
        tail_slack: tail,
        cutoff,
    })
}

/// A(D,l) = 6 sqrt 2 (1 - d^2/c^2)^(-(l-1)/2), rounded up.
pub fn a_factor(form: &LinearForm, ell: u32) -> Result<f64, Error> {
    if form.constant_modulus() {
        return Err(Error::CertificateUnavailable(
            "d(D) = c(D) for constant-modulus coefficients".to_string(),
        ));
    }
    let p = PREC;
    let d = form.l1().with_prec(p);
    let x = &BigReal::one(p) - &(&(&d * &d) / &form.csq().to_big_real(p));
    let s = x.sqrt().recip();
    let pow = if ell >= 1 {
        s.powi(ell as u64 - 1)
    } else {
        x.sqrt()
    };
    let a = &BigReal::from_i64(72, p).sqrt() * &pow;
    Ok(round_up(&a))
}

fn up(x: f64) -> f64 {
    x.next_up()
}

fn const_up(v: BigReal) -> f64 {
    round_up(&v)
}

/// Gamma(3/4)/3 and 2 * 2^(1/4), evaluated at 128 bits and rounded up.
fn tail_constants() -> (f64, f64, f64) {
    let p = 128;
    let g = constant(Constant::GammaThreeQuarters, p).div_int(&BigInt::from(3));
    let two = BigReal::from_i64(2, p);
    let k2 = &two * &two.sqrt().sqrt();
    let sqrt_pi = constant(Constant::Pi, p).sqrt();
    (const_up(g), const_up(k2), const_up(sqrt_pi))
}

/// Bound on |m(P_D) - estimate| after N terms given an upper bound g for G.
pub fn tail(form: &LinearForm, variant: TailVariant, n_terms: usize, g: f64) -> Result<f64, Error> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let (k1, k2, sqrt_pi) = tail_constants();
    let n = n_terms as f64;
    let rn = libm::sqrt(n);
    // N^(3/4) from square roots keeps the power law exact under N -> 16N
    let n34 = rn * libm::sqrt(rn);
    Ok(match variant {
        TailVariant::E1 => up(up(k1 * g) / n34),
        TailVariant::E2 | TailVariant::SEll(1) => up(up(k2 * g) / rn),
        TailVariant::SEll(0) => {
            // the l = 0 partial sum equals the l = 1 one plus U_N / (2(N+1)), |U_N| <= 1
            let e2 = up(up(k2 * g) / rn);
            up(e2 + up(1.0 / (2.0 * (n + 1.0))))
        }
        TailVariant::SEll(l) => {
            let a = a_factor(form, l)?;
            up(up(up(sqrt_pi * a) * g) / rn)
        }
    })
}

/// Everything the certificate machinery knows about one form.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub g_elementary: Option<f64>,
    pub g_quadrature: Option<QuadratureG>,
    pub breakpoints: Vec<f64>,
    pub a_factor: Vec<(u32, Option<f64>)>,
    pub tails: Vec<(TailVariant, usize, Option<f64>)>,
}

pub fn bound_report(form: &LinearForm, ells: &[u32], ns: &[usize]) -> BoundReport {
    let g = g_elementary(form).ok();
    let gq = g_quadrature(form).ok();
    let a_factor = ells
        .iter()
        .filter(|&&l| l >= 2)
        .map(|&l| (l, a_factor(form, l).ok()))
        .collect();
    let mut variants = alloc::vec![TailVariant::E1, TailVariant::E2];
    variants.extend(ells.iter().filter(|&&l| l != 1).map(|&l| TailVariant::SEll(l)));
    let mut tails = Vec::new();
    for v in variants {
        for &n in ns {
            let t = g.and_then(|g| tail(form, v, n, g).ok());
            tails.push((v, n, t));
        }
    }
    BoundReport {
        g_elementary: g,
        g_quadrature: gq,
        breakpoints: breakpoints(form),
        a_factor,
        tails,
    }
}
