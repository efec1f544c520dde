use alloc::vec::Vec;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::bigreal::{shift_round, BigReal};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    EulerGamma,
    GammaThreeQuarters,
    Zeta3,
    L2Chi3,
}

impl Constant {
    pub const ALL: [Constant; 5] = [
        Constant::Pi,
        Constant::EulerGamma,
        Constant::GammaThreeQuarters,
        Constant::Zeta3,
        Constant::L2Chi3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::EulerGamma => "euler_gamma",
            Constant::GammaThreeQuarters => "gamma_three_quarters",
            Constant::Zeta3 => "zeta3",
            Constant::L2Chi3 => "l2_chi3",
        }
    }
}

impl FromStr for Constant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Constant::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownConstant(s.into()))
    }
}

/// Evaluates a named constant to `p` bits (at least 64).
pub fn constant(c: Constant, p: u32) -> BigReal {
    let p = p.max(64);
    let w = p + 32;
    let v = match c {
        Constant::Pi => pi(w),
        Constant::EulerGamma => euler_gamma(w),
        Constant::GammaThreeQuarters => gamma_three_quarters(w),
        Constant::Zeta3 => zeta3(w),
        Constant::L2Chi3 => l2_chi3(w),
    };
    v.with_prec(p)
}

pub fn constant_by_name(name: &str, p: u32) -> Result<BigReal, Error> {
    Ok(constant(name.parse()?, p))
}

fn atan_inv(q: u64, w: u32) -> BigInt {
    let q2 = BigInt::from(q * q);
    let mut pow = (BigInt::one() << (w as usize)) / BigInt::from(q);
    let mut sum = pow.clone();
    let mut k = 3u64;
    let mut neg = true;
    loop {
        pow /= &q2;
        if pow.is_zero() {
            break;
        }
        let t = &pow / BigInt::from(k);
        if neg {
            sum -= t;
        } else {
            sum += t;
        }
        neg = !neg;
        k += 2;
    }
    sum
}

fn pi(p: u32) -> BigReal {
    let w = p + 32;
    let v = (atan_inv(5, w) << 4u32) - (atan_inv(239, w) << 2u32);
    BigReal::from_fixed(v, w, p)
}

// Brent-McMillan: gamma = A/B - ln n with the error below pi*exp(-4n).
fn euler_gamma(p: u32) -> BigReal {
    let w = p + 32;
    let n = (p as f64 * core::f64::consts::LN_2 / 4.0) as u64 + 2;
    let ln_n = BigReal::from_i64(n as i64, w).ln();
    let n2 = BigInt::from(n) * BigInt::from(n);
    let one = BigInt::one() << (w as usize);
    let mut a_k = -ln_n.to_fixed(w);
    let mut b_k = one;
    let mut a = a_k.clone();
    let mut b = b_k.clone();
    let mut k = 1u64;
    loop {
        let kk = BigInt::from(k);
        b_k = &b_k * &n2 / (&kk * &kk);
        a_k = (&a_k * &n2 / &kk + &b_k) / &kk;
        if b_k.is_zero() && a_k.is_zero() {
            break;
        }
        a += &a_k;
        b += &b_k;
        k += 1;
    }
    BigReal::from_ratio(&a, &b, p)
}

fn agm(a: &BigReal, b: &BigReal) -> BigReal {
    let p = a.prec();
    let tol = -(p as i64) + 4;
    let (mut a, mut b) = (a.clone(), b.clone());
    loop {
        let diff = &a - &b;
        match diff.top() {
            None => break,
            Some(t) if t < tol => break,
            _ => {}
        }
        let next = (&a + &b).ldexp(-1);
        b = (&a * &b).sqrt();
        a = next;
    }
    a
}

// Gamma(1/4)^2 = (2 pi)^(3/2) / AGM(1, sqrt 2) and Gamma(1/4) Gamma(3/4) = pi sqrt 2.
fn gamma_three_quarters(p: u32) -> BigReal {
    let w = p + 16;
    let pi = pi(w);
    let sqrt2 = BigReal::from_i64(2, w).sqrt();
    let two_pi = pi.ldexp(1);
    let num = &two_pi * &two_pi.sqrt();
    let g14 = (&num / &agm(&BigReal::one(w), &sqrt2)).sqrt();
    (&(&pi * &sqrt2) / &g14).with_prec(p)
}

// zeta(3) = 5/2 sum (-1)^(k+1) / (k^3 C(2k,k)).
fn zeta3(p: u32) -> BigReal {
    let w = p + 32;
    let one = BigInt::one() << (w as usize);
    let mut central = BigInt::one();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    loop {
        central = central * BigInt::from(2 * (2 * k - 1)) / BigInt::from(k);
        let kb = BigInt::from(k);
        let t = &one / (&central * &kb * &kb * &kb);
        if t.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sum += t;
        } else {
            sum -= t;
        }
        k += 1;
    }
    let v = shift_round(&(sum * BigInt::from(5)), -1);
    BigReal::from_fixed(v, w, p)
}

/// Even-index Bernoulli numbers B_2, B_4, ..., B_2q.
pub(crate) fn bernoulli_even(q: usize) -> Vec<BigRational> {
    let m = 2 * q;
    let mut b: Vec<BigRational> = Vec::with_capacity(m + 1);
    b.push(BigRational::one());
    for n in 1..=m {
        // sum_{j<=n} C(n+1, j) B_j = 0
        let mut s = BigRational::zero();
        let mut c = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            s += BigRational::from_integer(c.clone()) * bj;
            c = c * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-s / BigRational::from_integer(BigInt::from(n + 1)));
    }
    (1..=q).map(|i| b[2 * i].clone()).collect()
}

// sum_{k>=0} f(k), f(x) = (3x+1)^-2 - (3x+2)^-2, by Euler-Maclaurin from M on.
fn l2_chi3(p: u32) -> BigReal {
    let w = p + 32;
    let m = (w / 4 + 16) as i64;
    let one = BigReal::one(w);
    let f = |a: i64| -> BigReal {
        let x = BigReal::from_i64(a, w);
        (&one / &(&x * &x)).with_prec(w)
    };
    let mut s = BigReal::zero(w);
    for k in 0..m {
        s = &s + &(&f(3 * k + 1) - &f(3 * k + 2));
    }
    let a1 = BigReal::from_i64(3 * m + 1, w);
    let a2 = BigReal::from_i64(3 * m + 2, w);
    let integral = (&(&one / &a1) - &(&one / &a2)).div_int(&BigInt::from(3));
    s = &s + &integral;
    s = &s + &(&f(3 * m + 1) - &f(3 * m + 2)).ldexp(-1);
    // with M >= w/4 the corrections fall below 2^-w well within w/4 terms
    let bern = bernoulli_even((w / 4 + 8) as usize);
    let inv1 = &one / &a1;
    let inv2 = &one / &a2;
    let inv1_sq = &inv1 * &inv1;
    let inv2_sq = &inv2 * &inv2;
    let mut p1 = &inv1_sq * &inv1;
    let mut p2 = &inv2_sq * &inv2;
    let mut three_pow = BigReal::from_i64(3, w);
    let nine = BigReal::from_i64(9, w);
    let tol = -(w as i64) - 8;
    for b2i in bern.iter() {
        let bern_r = BigReal::from_rational(b2i, w);
        let term = &(&bern_r * &three_pow) * &(&p1 - &p2);
        s = &s + &term;
        if term.top().is_none_or(|t| t < tol) {
            break;
        }
        p1 = &p1 * &inv1_sq;
        p2 = &p2 * &inv2_sq;
        three_pow = &three_pow * &nine;
    }
    s.with_prec(p)
}

/// H_l as an exact fraction.
pub fn harmonic(l: u64) -> BigRational {
    let mut h = BigRational::zero();
    for i in 1..=l {
        h += BigRational::new(BigInt::one(), BigInt::from(i));
    }
    h
}
