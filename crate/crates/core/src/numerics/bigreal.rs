use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Binary floating point number with an explicit mantissa width.
///
/// The value is `mant * 2^exp` with `|mant| < 2^prec`. Every operation rounds
/// its result to nearest at the larger precision of its operands.
#[derive(Clone)]
pub struct BigReal {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

const GUARD: u32 = 64;

fn round_to(mant: BigInt, exp: i64, prec: u32) -> BigReal {
    if mant.is_zero() {
        return BigReal::zero(prec);
    }
    let bits = mant.bits();
    if bits <= prec as u64 {
        return BigReal { mant, exp, prec };
    }
    let shift = bits - prec as u64;
    let (sign, mag) = mant.into_parts();
    let up = mag.bit(shift - 1);
    let mut q = mag >> shift;
    if up {
        q += 1u32;
    }
    let mut e = exp + shift as i64;
    if q.bits() > prec as u64 {
        q >>= 1u32;
        e += 1;
    }
    BigReal {
        mant: BigInt::from_biguint(sign, q),
        exp: e,
        prec,
    }
}

/// Shift with rounding to nearest; negative `s` shifts right.
pub(crate) fn shift_round(v: &BigInt, s: i64) -> BigInt {
    if s >= 0 {
        v << (s as usize)
    } else {
        let r = (-s) as u64;
        let (sign, mag) = (v.sign(), v.magnitude());
        let up = mag.bit(r - 1);
        let mut q = mag >> (r as usize);
        if up {
            q += 1u32;
        }
        BigInt::from_biguint(sign, q)
    }
}

impl BigReal {
    pub fn zero(prec: u32) -> Self {
        BigReal {
            mant: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        round_to(BigInt::from(v), 0, prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        round_to(v.clone(), 0, prec)
    }

    /// `num / den` rounded to `prec` bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "division by zero");
        if num.is_zero() {
            return Self::zero(prec);
        }
        let s = (prec as i64 + 2 + den.bits() as i64 - num.bits() as i64).max(0);
        let q = (num << (s as usize)).div_floor(den);
        // floor keeps the sticky information below the kept bits small enough
        round_to(q, -s, prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Self::from_ratio(r.numer(), r.denom(), prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite(), "non-finite input");
        if x == 0.0 {
            return Self::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        round_to(BigInt::from(m) * sign, e, prec)
    }

    /// Value of `v / 2^frac` rounded to `prec` bits.
    pub fn from_fixed(v: BigInt, frac: u32, prec: u32) -> Self {
        round_to(v, -(frac as i64), prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        round_to(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        BigReal {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Position just above the leading bit: `2^(top-1) <= |x| < 2^top`.
    pub fn top(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mant.bits() as i64)
        }
    }

    /// Multiplication by `2^k`, exact.
    pub fn ldexp(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigReal {
            mant: self.mant.clone(),
            exp: self.exp + k,
            prec: self.prec,
        }
    }

    /// Exact binary representation `(mant, exp)` with trailing zeros stripped.
    pub fn to_parts(&self) -> (BigInt, i64) {
        if self.is_zero() {
            return (BigInt::zero(), 0);
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        (&self.mant >> (tz as usize), self.exp + tz as i64)
    }

    /// `round(self * c * 2^frac)` as an integer.
    pub fn mul_to_fixed(&self, c: &BigInt, frac: u32) -> BigInt {
        if self.is_zero() || c.is_zero() {
            return BigInt::zero();
        }
        shift_round(&(&self.mant * c), self.exp + frac as i64)
    }

    pub fn to_fixed(&self, frac: u32) -> BigInt {
        shift_round(&self.mant, self.exp + frac as i64)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let s = (bits - 64).max(0);
        let m = shift_round(&self.mant, -s);
        let m = m.to_i128().expect("fits in 65 bits") as f64;
        let e = (self.exp + s).clamp(-4000, 4000) as i32;
        libm::scalbn(m, e)
    }

    /// Round toward +infinity to a double.
    pub fn to_f64_up(&self) -> f64 {
        let x = self.to_f64();
        let back = BigReal::from_f64(x, self.prec.max(64));
        if back.cmp(self) == Ordering::Less {
            x.next_up()
        } else {
            x
        }
    }

    fn add_impl(&self, other: &Self, negate_other: bool) -> Self {
        let prec = self.prec.max(other.prec);
        let b_mant = if negate_other {
            -&other.mant
        } else {
            other.mant.clone()
        };
        if other.is_zero() {
            return self.with_prec(prec);
        }
        if self.is_zero() {
            return round_to(b_mant, other.exp, prec);
        }
        let ta = self.top().unwrap();
        let tb = other.top().unwrap();
        let gap = prec as i64 + 4;
        if ta - tb > gap {
            return self.with_prec(prec);
        }
        if tb - ta > gap {
            return round_to(b_mant, other.exp, prec);
        }
        let e = self.exp.min(other.exp);
        let sum = (&self.mant << ((self.exp - e) as usize)) + (b_mant << ((other.exp - e) as usize));
        round_to(sum, e, prec)
    }

    pub fn sqrt(&self) -> Self {
        assert!(self.signum() >= 0, "square root of a negative number");
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prec as i64 + 2;
        let mut s = 2 * p - self.mant.bits() as i64;
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let m = if s >= 0 {
            &self.mant << (s as usize)
        } else {
            &self.mant >> ((-s) as usize)
        };
        let r = m.sqrt();
        round_to(r, (self.exp - s) / 2, self.prec)
    }

    /// Natural logarithm; panics on nonpositive input.
    pub fn ln(&self) -> Self {
        assert!(self.signum() > 0, "logarithm of a nonpositive number");
        let w = self.prec + GUARD;
        let b = self.mant.bits() as i64;
        let mut e = self.exp + b;
        let mut f = shift_round(&self.mant, w as i64 - b);
        let three_quarters = BigInt::from(3) << ((w - 2) as usize);
        if f < three_quarters {
            f <<= 1u32;
            e -= 1;
        }
        let one = BigInt::one() << (w as usize);
        let y = ((&f - &one) << (w as usize)) / (&f + &one);
        let mut acc = fixed_atanh(&y, w) << 1u32;
        if e != 0 {
            let extra = 64 - (e.unsigned_abs()).leading_zeros();
            let l2 = ln2_fixed(w + extra);
            acc += shift_round(&(l2 * BigInt::from(e)), -(extra as i64));
        }
        BigReal::from_fixed(acc, w, self.prec)
    }

    pub fn exp(&self) -> Self {
        let prec = self.prec;
        if self.is_zero() {
            return Self::one(prec);
        }
        let xf = self.to_f64();
        assert!(xf.abs() < 1.0e9, "exponent argument out of range");
        let k = libm::round(xf / core::f64::consts::LN_2) as i64;
        let kbits = 64 - k.unsigned_abs().leading_zeros();
        let s: u32 = 12;
        let w = prec + GUARD + kbits + s;
        let l2 = ln2_fixed(w + kbits + 2);
        let r = self.to_fixed(w) - shift_round(&(l2 * BigInt::from(k)), -((kbits + 2) as i64));
        let r = shift_round(&r, -(s as i64));
        let one = BigInt::one() << (w as usize);
        let mut sum = one.clone();
        let mut term = one;
        let mut i = 1u64;
        loop {
            term = shift_round(&(&term * &r), -(w as i64)) / BigInt::from(i);
            if term.is_zero() {
                break;
            }
            sum += &term;
            i += 1;
        }
        for _ in 0..s {
            sum = shift_round(&(&sum * &sum), -(w as i64));
        }
        round_to(sum, k - w as i64, prec)
    }

    pub fn powi(&self, n: u64) -> Self {
        let guard = 64 - n.leading_zeros() + 8;
        let wp = self.prec + guard;
        let mut base = self.with_prec(wp);
        let mut acc = BigReal::one(wp);
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc.with_prec(self.prec)
    }

    pub fn recip(&self) -> Self {
        &BigReal::one(self.prec) / self
    }

    pub fn mul_int(&self, c: &BigInt) -> Self {
        round_to(&self.mant * c, self.exp, self.prec)
    }

    pub fn div_int(&self, c: &BigInt) -> Self {
        let exact = BigReal::from_bigint(c, (c.bits() as u32 + 1).max(self.prec));
        (self / &exact).with_prec(self.prec)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return String::from("0");
        }
        let top = self.top().unwrap() - 1;
        let e10 = libm::floor(top as f64 * core::f64::consts::LOG10_2) as i64;
        let scale = digits as i64 - 1 - e10;
        let ten = BigInt::from(10u32);
        let n = if scale >= 0 {
            let v = &self.mant * num_traits::pow(ten, scale as usize);
            shift_round(&v, self.exp)
        } else {
            let d = num_traits::pow(ten, (-scale) as usize);
            let (num, den) = if self.exp >= 0 {
                (&self.mant << (self.exp as usize), d)
            } else {
                (self.mant.clone(), d << ((-self.exp) as usize))
            };
            round_div(&num, &den)
        };
        let neg = n.is_negative();
        let mut body: String = alloc::format!("{}", n.abs());
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if scale <= 0 {
            out.push_str(&body);
            for _ in 0..(-scale) {
                out.push('0');
            }
            return out;
        }
        let scale = scale as usize;
        while body.len() <= scale {
            body.insert(0, '0');
        }
        let (int, frac) = body.split_at(body.len() - scale);
        out.push_str(int);
        out.push('.');
        out.push_str(frac);
        out
    }

    /// Parses `[-]digits[.digits][e[-]digits]`.
    pub fn parse_decimal(text: &str, prec: u32) -> Option<Self> {
        let (num, den) = parse_decimal_ratio(text)?;
        Some(Self::from_ratio(&num, &den, prec))
    }
}

fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let twice = num << 1u32;
    (twice + if num.is_negative() { -den } else { den.clone() }) / (den << 1u32)
}

/// Splits a decimal literal into an exact fraction.
pub(crate) fn parse_decimal_ratio(text: &str) -> Option<(BigInt, BigInt)> {
    let t = text.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (body, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().ok()?),
        None => (t, 0),
    };
    let (int, frac) = match body.find('.') {
        Some(i) => (&body[..i], &body[i + 1..]),
        None => (body, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    if exp.abs() > 100_000 {
        return None;
    }
    let mut digits = String::from(int);
    digits.push_str(frac);
    let mut num: BigInt = digits.parse().ok()?;
    if neg {
        num = -num;
    }
    let e10 = exp - frac.len() as i64;
    let ten = BigInt::from(10u32);
    if e10 >= 0 {
        Some((num * num_traits::pow(ten, e10 as usize), BigInt::one()))
    } else {
        Some((num, num_traits::pow(ten, (-e10) as usize)))
    }
}

/// atanh(y / 2^w) * 2^w for |y| < 2^(w-1).
pub(crate) fn fixed_atanh(y: &BigInt, w: u32) -> BigInt {
    let mut sum = y.clone();
    if y.is_zero() {
        return sum;
    }
    let y2 = shift_round(&(y * y), -(w as i64));
    let mut pow = y.clone();
    let mut k = 3u64;
    loop {
        pow = shift_round(&(&pow * &y2), -(w as i64));
        if pow.is_zero() {
            break;
        }
        sum += &pow / BigInt::from(k);
        k += 2;
    }
    sum
}

/// atanh(1/q) * 2^w.
fn fixed_atanh_inv(q: u64, w: u32) -> BigInt {
    let q2 = BigInt::from(q) * BigInt::from(q);
    let mut pow = (BigInt::one() << (w as usize)) / BigInt::from(q);
    let mut sum = pow.clone();
    let mut k = 3u64;
    loop {
        pow /= &q2;
        if pow.is_zero() {
            break;
        }
        sum += &pow / BigInt::from(k);
        k += 2;
    }
    sum
}

/// ln 2 * 2^w with a few bits of slack.
pub(crate) fn ln2_fixed(w: u32) -> BigInt {
    let g = 16;
    shift_round(&(fixed_atanh_inv(3, w + g) << 1u32), -(g as i64))
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BigReal {}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigReal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let (ta, tb) = (self.top().unwrap(), other.top().unwrap());
        if ta != tb {
            let o = ta.cmp(&tb);
            return if sa > 0 { o } else { o.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as usize);
        let b = &other.mant << ((other.exp - e) as usize);
        a.cmp(&b)
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, {} bits)", self.to_decimal_string(30), self.prec)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f
            .precision()
            .unwrap_or(((self.prec as f64) * core::f64::consts::LOG10_2) as usize);
        f.write_str(&self.to_decimal_string(digits))
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal {
            mant: -&self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -&self
    }
}

impl Add for &BigReal {
    type Output = BigReal;
    fn add(self, rhs: &BigReal) -> BigReal {
        self.add_impl(rhs, false)
    }
}

impl Sub for &BigReal {
    type Output = BigReal;
    fn sub(self, rhs: &BigReal) -> BigReal {
        self.add_impl(rhs, true)
    }
}

impl Mul for &BigReal {
    type Output = BigReal;
    fn mul(self, rhs: &BigReal) -> BigReal {
        round_to(
            &self.mant * &rhs.mant,
            self.exp + rhs.exp,
            self.prec.max(rhs.prec),
        )
    }
}

impl Div for &BigReal {
    type Output = BigReal;
    fn div(self, rhs: &BigReal) -> BigReal {
        assert!(!rhs.is_zero(), "division by zero");
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return BigReal::zero(prec);
        }
        let s = (prec as i64 + 2 + rhs.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let q = (&self.mant << (s as usize)) / &rhs.mant;
        round_to(q, self.exp - rhs.exp - s, prec)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal { (&self).$m(&rhs) }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

/// Sum of a slice in index order.
pub fn sum_in_order(xs: &[BigReal], prec: u32) -> BigReal {
    xs.iter().fold(BigReal::zero(prec), |acc, x| &acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_03: &str = "-1.20397280432593599262274621776183850295361093080602352429863";
    const EXP_25: &str = "12.1824939607034734380701759511679661831827677900631613115604";
    const SQRT2: &str = "1.41421356237309504880168872420969807856967187537694807317668";
    const LN2: &str = "0.69314718055994530941723212145817656807550013436025525412068";

    fn assert_close(v: &BigReal, s: &str, bits: i64) {
        let r = BigReal::parse_decimal(s, 400).unwrap();
        let d = (v - &r).abs();
        assert!(d < BigReal::one(64).ldexp(-bits), "{v:?} vs {s}");
    }

    #[test]
    fn elementary_functions() {
        for p in [64u32, 128, 180] {
            let b = p as i64 - 4;
            assert_close(&BigReal::parse_decimal("0.3", p).unwrap().ln(), LN_03, b);
            assert_close(&BigReal::parse_decimal("2.5", p).unwrap().exp(), EXP_25, b - 4);
            assert_close(&BigReal::from_i64(2, p).sqrt(), SQRT2, b);
            assert_close(&BigReal::from_i64(2, p).ln(), LN2, b);
        }
        assert!(BigReal::one(256).ln().is_zero());
        assert_eq!(BigReal::zero(64).exp(), BigReal::one(64));
    }

    #[test]
    fn ln_exp_round_trip() {
        for s in ["1e-30", "0.001", "0.9999", "1.0001", "7", "123456789.5"] {
            let x = BigReal::parse_decimal(s, 200).unwrap();
            let y = x.ln().exp();
            let rel = &(&y - &x).abs() / &x;
            assert!(rel < BigReal::one(64).ldexp(-180), "{s}");
        }
    }

    #[test]
    fn arithmetic_and_ordering() {
        let p = 128;
        let a = BigReal::from_ratio(&BigInt::from(1), &BigInt::from(3), p);
        let three = BigReal::from_i64(3, p);
        let one = &a * &three;
        assert!((&one - &BigReal::one(p)).abs() < BigReal::one(p).ldexp(-125));
        assert!(a < BigReal::one(p));
        assert!(-&a < BigReal::zero(p));
        assert_eq!(
            BigReal::from_i64(5, 64) - BigReal::from_i64(5, 64),
            BigReal::zero(64)
        );
        let tiny = BigReal::one(p).ldexp(-1000);
        assert_eq!(&BigReal::one(p) + &tiny, BigReal::one(p));
        assert_eq!(BigReal::from_f64(0.1, 64).to_f64(), 0.1);
        assert_eq!(BigReal::from_f64(-3.75e-300, 64).to_f64(), -3.75e-300);
        assert_eq!(BigReal::from_i64(7, 64).powi(5), BigReal::from_i64(16807, 64));
    }

    #[test]
    fn decimal_rendering() {
        let x = BigReal::from_ratio(&BigInt::from(1), &BigInt::from(8), 64);
        assert_eq!(x.to_decimal_string(3), "0.125");
        assert_eq!(BigReal::from_i64(-1500, 64).to_decimal_string(2), "-1500");
        assert_eq!(BigReal::from_i64(0, 64).to_decimal_string(2), "0");
        let y = BigReal::parse_decimal("2.5e-3", 64).unwrap();
        assert_eq!(y.to_decimal_string(4), "0.002500");
        assert!(BigReal::parse_decimal("1.2.3", 64).is_none());
        assert!(BigReal::parse_decimal("", 64).is_none());
    }

    #[test]
    fn to_f64_up_is_an_upper_bound() {
        let third = BigReal::from_ratio(&BigInt::from(1), &BigInt::from(3), 200);
        let up = third.to_f64_up();
        assert!(BigReal::from_f64(up, 200) >= third);
        assert!(up - 1.0 / 3.0 <= f64::EPSILON);
    }
}
