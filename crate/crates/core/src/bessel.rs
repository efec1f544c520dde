//! J0 and J1 in double precision.
//!
//! |x| <= 30: power series summed in double-double arithmetic, since the
//! alternating terms reach ~1e11 before they cancel down to O(1).
//! |x| > 30: Hankel asymptotic expansion.

const CROSSOVER: f64 = 30.0;

#[derive(Clone, Copy, Debug)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd(s, b - (s - a))
}

/// Veltkamp split: a = hi + lo with both halves exactly representable in 26 bits.
fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Dekker's exact product: a * b = p + e.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.0, o.0);
        quick_two_sum(s, e + self.1 + o.1)
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.0, o.0);
        quick_two_sum(p, e + self.0 * o.1 + self.1 * o.0)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q = self.0 / d;
        let (p, e) = two_prod(q, d);
        let r = (self.0 - p - e + self.1) / d;
        quick_two_sum(q, r)
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }
}

/// sum_k (-y)^k / (k! (k+nu)!) with y = (x/2)^2.
fn series(x: f64, nu: u32) -> f64 {
    let h = x * 0.5;
    let (y0, y1) = two_prod(h, h);
    let neg_y = Dd(y0, y1).neg();
    let mut term = Dd(1.0, 0.0);
    if nu == 1 {
        term = Dd(h, 0.0);
    }
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term = term.mul(neg_y).div_f64(k * (k + nu as f64));
        sum = sum.add(term);
        // |J| <= 1, so an absolute cutoff far below one ulp is enough
        if k > h && term.0.abs() <= 1e-22 {
            break;
        }
        k += 1.0;
    }
    sum.0 + sum.1
}

fn hankel(x: f64, nu: u32) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let inv = 1.0 / x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    let mut k = 1u32;
    loop {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0) * inv;
        if a.abs() >= last || a.abs() < 1e-18 {
            break;
        }
        last = a.abs();
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * a;
        } else {
            p += sign * a;
        }
        k += 1;
    }
    let (s, c) = libm::sincos(x);
    let r = core::f64::consts::FRAC_1_SQRT_2;
    // chi = x - (nu/2 + 1/4) pi
    let (cos_chi, sin_chi) = if nu == 0 {
        ((c + s) * r, (s - c) * r)
    } else {
        ((s - c) * r, -(s + c) * r)
    };
    libm::sqrt(2.0 / (core::f64::consts::PI * x)) * (p * cos_chi - q * sin_chi)
}

/// Bessel function of the first kind, order 0.
pub fn j0(x: f64) -> f64 {
    let a = x.abs();
    if a <= CROSSOVER {
        series(a, 0)
    } else {
        hankel(a, 0)
    }
}

/// Bessel function of the first kind, order 1.
pub fn j1(x: f64) -> f64 {
    let a = x.abs();
    let v = if a <= CROSSOVER {
        series(a, 1)
    } else {
        hankel(a, 1)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

#[doc(hidden)]
pub fn j0_branches(x: f64) -> (f64, f64) {
    (series(x.abs(), 0), hankel(x.abs(), 0))
}

#[doc(hidden)]
pub fn j1_branches(x: f64) -> (f64, f64) {
    (series(x.abs(), 1), hankel(x.abs(), 1))
}
