//! Linear forms and the norms derived from their coefficients.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::numerics::{parse_decimal_ratio, BigReal, DEFAULT_PRECISION};
use crate::Error;

/// A real number that is either an exact fraction or a rounded binary value.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Approx(BigReal),
}

impl Scalar {
    pub fn to_big_real(&self, p: u32) -> BigReal {
        match self {
            Scalar::Exact(r) => BigReal::from_rational(r, p),
            Scalar::Approx(x) => x.with_prec(p.max(x.prec())),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_big_real(80).to_f64()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(x) => x.is_zero(),
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    fn square(&self, p: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r * r),
            Scalar::Approx(x) => {
                let x = x.with_prec(p);
                Scalar::Approx(&x * &x)
            }
        }
    }

    fn add(&self, other: &Scalar, p: u32) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Approx(&self.to_big_real(p) + &other.to_big_real(p)),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Approx(x) => write!(f, "{}", x.to_decimal_string(20)),
        }
    }
}

/// One complex coefficient together with the text it was read from.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient {
    pub re: Scalar,
    pub im: Scalar,
    text: String,
}

impl Coefficient {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn from_integer(v: i64) -> Self {
        Coefficient {
            re: Scalar::Exact(BigRational::from_integer(BigInt::from(v))),
            im: Scalar::Exact(BigRational::zero()),
            text: v.to_string(),
        }
    }

    pub fn parse(token: &str, p: u32) -> Option<Self> {
        let t = token.trim();
        if t.is_empty() || t.contains(char::is_whitespace) {
            return None;
        }
        let zero = || Scalar::Exact(BigRational::zero());
        let (re, im) = match t.strip_suffix(['i', 'I']) {
            None => (parse_real(t, p)?, zero()),
            Some(body) => {
                let split = body
                    .char_indices()
                    .filter(|&(i, c)| {
                        (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E')
                    })
                    .map(|(i, _)| i)
                    .next_back();
                let (re_txt, im_txt) = match split {
                    Some(i) => (&body[..i], &body[i..]),
                    None => ("", body),
                };
                let re = if re_txt.is_empty() {
                    zero()
                } else {
                    parse_real(re_txt, p)?
                };
                let im = match im_txt {
                    "" | "+" => Scalar::Exact(BigRational::one()),
                    "-" => Scalar::Exact(-BigRational::one()),
                    s => parse_real(s, p)?,
                };
                (re, im)
            }
        };
        Some(Coefficient {
            re,
            im,
            text: t.into(),
        })
    }

    fn modulus_squared(&self, p: u32) -> Scalar {
        self.re.square(p).add(&self.im.square(p), p)
    }
}

fn parse_real(s: &str, p: u32) -> Option<Scalar> {
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.strip_prefix('+').unwrap_or(a).parse().ok()?;
        let den: BigInt = b.parse().ok()?;
        if den.is_zero() || b.starts_with(['+', '-']) {
            return None;
        }
        return Some(Scalar::Exact(BigRational::new(num, den)));
    }
    let digits_only = s
        .strip_prefix(['+', '-'])
        .unwrap_or(s)
        .bytes()
        .all(|b| b.is_ascii_digit());
    if digits_only {
        let v: BigInt = s.strip_prefix('+').unwrap_or(s).parse().ok()?;
        return Some(Scalar::Exact(BigRational::from_integer(v)));
    }
    let (num, den) = parse_decimal_ratio(s)?;
    Some(Scalar::Approx(BigReal::from_ratio(&num, &den, p)))
}

/// Which certificates the theory supports for a given form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Eligibility {
    pub e1_certifiable: bool,
    pub s_ell_certifiable: bool,
    pub n_in_theorem_range: bool,
}

/// P_D = W0 Z0 + ... + Wn Zn.
#[derive(Clone, Debug)]
pub struct LinearForm {
    coeffs: Vec<Coefficient>,
    weights: Vec<Scalar>,
    exact: bool,
    precision: u32,
    moduli: Vec<f64>,
    sorted: Vec<f64>,
    l2sq: Scalar,
    csq: Scalar,
    l1: BigReal,
    nonzero: usize,
    constant_modulus: bool,
}

impl LinearForm {
    /// Parses a comma separated coefficient list.
    pub fn parse(text: &str) -> Result<Self, Error> {
        Self::parse_with_precision(text, DEFAULT_PRECISION)
    }

    pub fn parse_with_precision(text: &str, p: u32) -> Result<Self, Error> {
        if text.trim().is_empty() {
            return Err(Error::EmptyInput);
        }
        let coeffs = text
            .split(',')
            .enumerate()
            .map(|(index, tok)| {
                Coefficient::parse(tok, p).ok_or_else(|| Error::MalformedToken {
                    index,
                    token: tok.into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coefficients(coeffs, p)
    }

    pub fn from_integers(values: &[i64]) -> Result<Self, Error> {
        let coeffs = values.iter().map(|&v| Coefficient::from_integer(v)).collect();
        Self::from_coefficients(coeffs, DEFAULT_PRECISION)
    }

    pub fn from_coefficients(coeffs: Vec<Coefficient>, p: u32) -> Result<Self, Error> {
        if coeffs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let weights: Vec<Scalar> = coeffs.iter().map(|c| c.modulus_squared(p)).collect();
        if weights.iter().all(Scalar::is_zero) {
            return Err(Error::AllZero);
        }
        let exact = weights.iter().all(|w| matches!(w, Scalar::Exact(_)));
        let mut l2sq = Scalar::Exact(BigRational::zero());
        for w in &weights {
            l2sq = l2sq.add(w, p);
        }
        let count = BigInt::from(coeffs.len());
        let csq = match &l2sq {
            Scalar::Exact(r) => Scalar::Exact(r * BigRational::from_integer(count)),
            Scalar::Approx(x) => Scalar::Approx(x.mul_int(&count)),
        };
        let roots: Vec<BigReal> = weights.iter().map(|w| w.to_big_real(p).sqrt()).collect();
        let l1 = roots.iter().fold(BigReal::zero(p), |a, r| &a + r);
        let moduli: Vec<f64> = roots.iter().map(BigReal::to_f64).collect();
        let mut sorted = moduli.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let nonzero = weights.iter().filter(|w| !w.is_zero()).count();
        let constant_modulus = nonzero == weights.len() && weights.windows(2).all(|w| w[0] == w[1]);
        Ok(LinearForm {
            coeffs,
            weights,
            exact,
            precision: p,
            moduli,
            sorted,
            l2sq,
            csq,
            l1,
            nonzero,
            constant_modulus,
        })
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Coefficient] {
        &self.coeffs
    }

    /// True when every weight r_m^2 is an exact fraction.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Squared moduli r_m^2 in input order.
    pub fn weights(&self) -> &[Scalar] {
        &self.weights
    }

    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }

    /// Moduli sorted in descending order.
    pub fn sorted_moduli(&self) -> &[f64] {
        &self.sorted
    }

    pub fn l2sq(&self) -> &Scalar {
        &self.l2sq
    }

    /// c(D)^2 = (n+1) ||D||^2.
    pub fn csq(&self) -> &Scalar {
        &self.csq
    }

    /// d(D) = sum of the moduli.
    pub fn l1(&self) -> &BigReal {
        &self.l1
    }

    pub fn c(&self, p: u32) -> BigReal {
        self.csq.to_big_real(p + 8).sqrt().with_prec(p)
    }

    pub fn c_f64(&self) -> f64 {
        self.c(80).to_f64()
    }

    pub fn d_f64(&self) -> f64 {
        self.l1.to_f64()
    }

    pub fn norm_f64(&self) -> f64 {
        self.l2sq.to_big_real(80).sqrt().to_f64()
    }

    pub fn nonzero_count(&self) -> usize {
        self.nonzero
    }

    pub fn constant_modulus(&self) -> bool {
        self.constant_modulus
    }

    /// Nonzero moduli, descending.
    pub fn nonzero_moduli(&self) -> Vec<f64> {
        self.sorted.iter().copied().filter(|&r| r > 0.0).collect()
    }

    pub fn classify(&self) -> Eligibility {
        let e1 = self.nonzero >= 4;
        Eligibility {
            e1_certifiable: e1,
            s_ell_certifiable: e1 && !self.constant_modulus,
            n_in_theorem_range: self.n() >= 3,
        }
    }

    /// Why no certificate exists for the S_l family at `ell`, if none does.
    pub fn certificate_obstacle(&self, ell: Option<u32>) -> Option<String> {
        if self.n() < 3 {
            return Some(format!("n={} is below the proven range n >= 3", self.n()));
        }
        if self.nonzero < 4 {
            return Some(format!(
                "only {} nonzero coefficients; the G integral needs at least 4",
                self.nonzero
            ));
        }
        match ell {
            Some(l) if l >= 2 && self.constant_modulus => Some(format!(
                "constant-modulus coefficients have no tail constant for l={l}"
            )),
            _ => None,
        }
    }

    /// Complex coefficients in double precision.
    pub fn complex_f64(&self) -> Vec<(f64, f64)> {
        self.coeffs
            .iter()
            .map(|c| (c.re.to_f64(), c.im.to_f64()))
            .collect()
    }

    /// Exact weights, when the form is exact.
    pub fn exact_weights(&self) -> Option<Vec<BigRational>> {
        self.weights.iter().map(|w| w.exact().cloned()).collect()
    }

    pub(crate) fn weights_big(&self, p: u32) -> Vec<BigReal> {
        self.weights.iter().map(|w| w.to_big_real(p)).collect()
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&c.text)?;
        }
        Ok(())
    }
}
