//! Generalized exponential integral E_s(z) = int_1^inf e^{-zt} t^{-s} dt for
//! real s and complex z off the negative real axis.

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub fn expint(s: f64, z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        assert!(s > 1.0, "E_s(0) diverges for s <= 1");
        return Complex64::new(1.0 / (s - 1.0), 0.0);
    }
    if z.norm() < 2.0 {
        series(s, z)
    } else {
        continued_fraction(s, z)
    }
}

fn series(s: f64, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let is_int = s == libm::round(s) && s >= 1.0;
    let m = s as i64;
    // sum_k (-z)^k / (k! (1 - s + k)), skipping the pole k = s - 1
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = one; // (-z)^k / k!
    let mut singular = one;
    for k in 0..200i64 {
        if is_int && k == m - 1 {
            singular = pow;
        } else {
            sum += pow / (1.0 - s + k as f64);
        }
        pow = pow * (-z) / (k + 1) as f64;
        if pow.norm() < 1e-18 && k > m {
            break;
        }
    }
    if is_int {
        let psi = -EULER_GAMMA + (1..m).map(|k| 1.0 / k as f64).sum::<f64>();
        singular * (Complex64::new(psi, 0.0) - z.ln()) - sum
    } else {
        let g = libm::tgamma(1.0 - s);
        z.powf(s - 1.0) * g - sum
    }
}

fn continued_fraction(s: f64, z: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let mut b = z + s;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..20_000 {
        let an = -(i as f64) * (s - 1.0 + i as f64);
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (d * an + b);
        c = b + c.inv() * an;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn reference_values() {
        let one = Complex64::new(1.0, 0.0);
        assert!((expint(1.0, one).re - 0.219383934395520).abs() < 1e-14);
        assert!((expint(2.0, one).re - 0.148495506775922).abs() < 1e-14);
        let v = expint(1.0, Complex64::new(0.0, 1.0));
        assert!(close(
            v,
            Complex64::new(-0.3374039229009681, -0.6247132564277136),
            1e-13
        ));
        assert!((expint(2.5, Complex64::new(0.0, 0.0)).re - 1.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn recurrence() {
        // s E_{s+1}(z) = e^{-z} - z E_s(z)
        for s in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.5] {
            for z in [
                Complex64::new(0.0, 0.3),
                Complex64::new(0.0, -1.9),
                Complex64::new(0.0, 2.1),
                Complex64::new(0.0, 75.0),
                Complex64::new(0.4, -5.0),
                Complex64::new(3.0, 0.0),
            ] {
                let lhs = expint(s + 1.0, z) * s;
                let rhs = (-z).exp() - z * expint(s, z);
                assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()), "s={s} z={z}");
            }
        }
    }

    #[test]
    fn branches_meet() {
        for s in [1.5, 2.0, 3.5] {
            for ang in [0.5f64, 1.2, core::f64::consts::FRAC_PI_2] {
                let z = Complex64::from_polar(2.0, ang);
                let a = series(s, z);
                let b = continued_fraction(s, z);
                assert!(close(a, b, 1e-11), "s={s} z={z}: {a} {b}");
            }
        }
    }
}
