//! Squared multinomial moment sums a(n,k,D).
//!
//! a(n,k,D) = sum over l_0+...+l_n = k of (k!/(l_0!...l_n!))^2 prod |W_m|^(2 l_m).
//! Coordinates are folded in one at a time with
//! A_m(k) = sum_l C(k,l)^2 w_m^l A_{m-1}(k-l).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::linform::{LinearForm, Scalar};
use crate::numerics::BigReal;
use crate::Error;

#[derive(Clone, Debug)]
enum Data {
    /// a_k = scaled[k] / q^k and a_k / c^(2k) = scaled[k] / s^k.
    Exact {
        scaled: Vec<BigInt>,
        q: BigInt,
        s: BigInt,
    },
    Approx {
        values: Vec<BigReal>,
    },
}

/// a(n,k,D) for k = 0..=K together with the normalized ratios a_k / c(D)^(2k).
#[derive(Clone, Debug)]
pub struct MomentTable {
    n: usize,
    data: Data,
    ratios: Vec<BigReal>,
    ratio_prec: u32,
}

impl MomentTable {
    pub fn max_k(&self) -> usize {
        self.ratios.len() - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.data, Data::Exact { .. })
    }

    pub fn ratio_prec(&self) -> u32 {
        self.ratio_prec
    }

    /// a(n,k,D).
    pub fn value(&self, k: usize) -> Scalar {
        match &self.data {
            Data::Exact { scaled, q, .. } => {
                Scalar::Exact(BigRational::new(scaled[k].clone(), num_traits::pow(q.clone(), k)))
            }
            Data::Approx { values } => Scalar::Approx(values[k].clone()),
        }
    }

    /// a(n,k,D) / c(D)^(2k).
    pub fn ratio(&self, k: usize) -> &BigReal {
        &self.ratios[k]
    }

    pub fn ratios(&self) -> &[BigReal] {
        &self.ratios
    }

    /// The exact ratio, available in rational mode.
    pub fn ratio_exact(&self, k: usize) -> Option<BigRational> {
        match &self.data {
            Data::Exact { scaled, s, .. } => {
                Some(BigRational::new(scaled[k].clone(), num_traits::pow(s.clone(), k)))
            }
            Data::Approx { .. } => None,
        }
    }

    /// Ratios recomputed at precision `p` where the table is exact.
    pub fn refined_ratios(&self, upto: usize, p: u32) -> Vec<BigReal> {
        match &self.data {
            Data::Exact { scaled, s, .. } => {
                let mut pow = BigInt::one();
                let mut out = Vec::with_capacity(upto + 1);
                for a in scaled.iter().take(upto + 1) {
                    out.push(BigReal::from_ratio(a, &pow, p));
                    pow *= s;
                }
                out
            }
            Data::Approx { .. } => self.ratios[..=upto].to_vec(),
        }
    }

    /// The table truncated to `max_k` with ratios rounded to `p` bits. Exact
    /// tables are re-rounded from the integers; approximate ones cannot gain
    /// precision, so `None` is returned when `p` exceeds what they hold.
    pub fn reprecise(&self, max_k: usize, p: u32) -> Option<MomentTable> {
        let max_k = max_k.min(self.max_k());
        let data = match &self.data {
            Data::Exact { scaled, q, s } => Data::Exact {
                scaled: scaled[..=max_k].to_vec(),
                q: q.clone(),
                s: s.clone(),
            },
            Data::Approx { values } if p <= self.ratio_prec => Data::Approx {
                values: values[..=max_k].to_vec(),
            },
            Data::Approx { .. } => return None,
        };
        let ratios = match &data {
            Data::Exact { .. } => self.refined_ratios(max_k, p),
            Data::Approx { .. } => self.ratios[..=max_k].iter().map(|r| r.with_prec(p)).collect(),
        };
        Some(MomentTable {
            n: self.n,
            data,
            ratios,
            ratio_prec: p,
        })
    }
}

/// Builds the table for k = 0..=K with ratios rounded to `p` bits.
pub fn moment_table(form: &LinearForm, max_k: usize, p: u32) -> MomentTable {
    let n = form.n();
    match form.exact_weights() {
        Some(w) => {
            let q = w.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            let nums: Vec<BigInt> = w.iter().map(|r| r.numer() * (&q / r.denom())).collect();
            let total: BigInt = nums.iter().sum();
            let s = total * BigInt::from(n + 1);
            let scaled = integer_moments(&nums, max_k);
            let mut pow = BigInt::one();
            let mut ratios = Vec::with_capacity(max_k + 1);
            for a in &scaled {
                ratios.push(BigReal::from_ratio(a, &pow, p));
                pow *= &s;
            }
            MomentTable {
                n,
                data: Data::Exact { scaled, q, s },
                ratios,
                ratio_prec: p,
            }
        }
        None => {
            let guard = usize::BITS - max_k.leading_zeros() + 32;
            let pd = p + guard;
            let w = form.weights_big(pd);
            let values = real_moments(&w, max_k, pd);
            let csq = form.csq().to_big_real(pd);
            let mut pow = BigReal::one(pd);
            let mut ratios = Vec::with_capacity(max_k + 1);
            for a in &values {
                ratios.push((a / &pow).with_prec(p));
                pow = &pow * &csq;
            }
            let values = values.iter().map(|v| v.with_prec(p)).collect();
            MomentTable {
                n,
                data: Data::Approx { values },
                ratios,
                ratio_prec: p,
            }
        }
    }
}

fn squared_binomial_row(k: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(k + 1);
    let mut c = BigInt::one();
    for l in 0..=k {
        row.push(&c * &c);
        c = c * BigInt::from(k - l) / BigInt::from(l + 1);
    }
    row
}

/// Moments for integer weights. All coordinates advance together in k so the
/// binomial row is built once per k.
pub(crate) fn integer_moments(weights: &[BigInt], max_k: usize) -> Vec<BigInt> {
    let ws: Vec<&BigInt> = weights.iter().filter(|w| !w.is_zero()).collect();
    let unit: Vec<bool> = ws.iter().map(|w| w.is_one()).collect();
    let powers: Vec<Vec<BigInt>> = ws
        .iter()
        .map(|w| {
            let mut v = Vec::with_capacity(max_k + 1);
            let mut x = BigInt::one();
            for _ in 0..=max_k {
                v.push(x.clone());
                x *= *w;
            }
            v
        })
        .collect();
    let m = ws.len();
    let mut layers: Vec<Vec<BigInt>> = vec![Vec::with_capacity(max_k + 1); m];
    for k in 0..=max_k {
        let row = squared_binomial_row(k);
        layers[0].push(powers[0][k].clone());
        for j in 1..m {
            let (prev, cur) = layers.split_at_mut(j);
            let prev = &prev[j - 1];
            let mut acc = BigInt::zero();
            for l in 0..=k {
                let t = &row[l] * &prev[k - l];
                if unit[j] {
                    acc += t;
                } else {
                    acc += t * &powers[j][l];
                }
            }
            cur[0].push(acc);
        }
    }
    layers.pop().unwrap()
}

fn real_moments(weights: &[BigReal], max_k: usize, p: u32) -> Vec<BigReal> {
    let ws: Vec<&BigReal> = weights.iter().filter(|w| !w.is_zero()).collect();
    let powers: Vec<Vec<BigReal>> = ws
        .iter()
        .map(|w| {
            let mut v = Vec::with_capacity(max_k + 1);
            let mut x = BigReal::one(p);
            for _ in 0..=max_k {
                v.push(x.clone());
                x = &x * *w;
            }
            v
        })
        .collect();
    let m = ws.len();
    let mut layers: Vec<Vec<BigReal>> = vec![Vec::with_capacity(max_k + 1); m];
    for k in 0..=max_k {
        let row = squared_binomial_row(k);
        layers[0].push(powers[0][k].clone());
        for j in 1..m {
            let (prev, cur) = layers.split_at_mut(j);
            let prev = &prev[j - 1];
            let mut acc = BigReal::zero(p);
            for l in 0..=k {
                let t = (&powers[j][l] * &prev[k - l]).mul_int(&row[l]);
                acc = &acc + &t;
            }
            cur[0].push(acc);
        }
    }
    layers.pop().unwrap()
}

/// Direct enumeration of all compositions of k; a test oracle for the DP.
pub fn moment_bruteforce(form: &LinearForm, k: usize) -> Result<Scalar, Error> {
    let parts = form.n() + 1;
    let count = binomial_u128((k + parts - 1) as u64, (parts - 1) as u64);
    if count > 1_000_000 {
        return Err(Error::InvalidArgument(alloc::format!(
            "{count} compositions exceed the enumeration guard"
        )));
    }
    let mut fact = vec![BigInt::one()];
    for i in 1..=k {
        let next = &fact[i - 1] * BigInt::from(i);
        fact.push(next);
    }
    let mut ls = vec![0usize; parts];
    match form.exact_weights() {
        Some(w) => {
            let mut total = BigRational::zero();
            compositions(&mut ls, 0, k, &mut |ls| {
                let mut denom = BigInt::one();
                let mut prod = BigRational::one();
                for (l, wm) in ls.iter().zip(&w) {
                    denom *= &fact[*l];
                    prod *= num_traits::pow(wm.clone(), *l);
                }
                let mult = &fact[k] / denom;
                total += prod * BigRational::from_integer(&mult * &mult);
            });
            Ok(Scalar::Exact(total))
        }
        None => {
            let p = form.precision() + 64;
            let w = form.weights_big(p);
            let mut total = BigReal::zero(p);
            compositions(&mut ls, 0, k, &mut |ls| {
                let mut denom = BigInt::one();
                let mut prod = BigReal::one(p);
                for (l, wm) in ls.iter().zip(&w) {
                    denom *= &fact[*l];
                    prod = &prod * &wm.powi(*l as u64);
                }
                let mult = &fact[k] / denom;
                total = &total + &prod.mul_int(&(&mult * &mult));
            });
            Ok(Scalar::Approx(total.with_prec(form.precision())))
        }
    }
}

fn compositions(ls: &mut [usize], i: usize, left: usize, f: &mut dyn FnMut(&[usize])) {
    if i + 1 == ls.len() {
        ls[i] = left;
        f(ls);
        return;
    }
    for l in 0..=left {
        ls[i] = l;
        compositions(ls, i + 1, left - l, f);
    }
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k.min(n - k) {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    c
}

/// Even moments W_{n+1}(2k) of the (n+1)-step unit random walk.
pub fn walk_moment(n: usize, k: usize) -> BigInt {
    let ones = vec![BigInt::one(); n + 1];
    integer_moments(&ones, k).pop().unwrap()
}
