//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! status if any criterion fails. Criteria run one after another so the timing
//! limits are measured on an otherwise idle process.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mahler_core::bessel::j0;
use mahler_core::bounds::{g_elementary, tail, TailVariant};
use mahler_core::lognorm::{jacobi, legendre};
use mahler_core::oracle::{mahler_jensen_quadrature, mahler_via_density, walk_cdf};
use mahler_core::series::{
    euler_identity_residual_with, mahler_estimate_with, padding_identity_residual_with, smyth_four_ones,
    smyth_three_ones, table_precision, SeriesOptions,
};
use mahler_core::{
    mahler_estimate, moment_bruteforce, moment_table, BigReal, LinearForm, MomentTable, Variant,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const P: u32 = 256;
const K: usize = 2000;

type Check = Result<String, String>;

struct Shared {
    ones: LinearForm,
    mixed: LinearForm,
    ones_table: MomentTable,
    mixed_table: MomentTable,
    /// m(1,1,1,1) from its closed form.
    ones_ref: f64,
    /// m(1,2,2,3) where the quadrature and density oracles agree.
    mixed_ref: f64,
}

fn form(s: &str) -> LinearForm {
    LinearForm::parse_with_precision(s, P).expect("valid form")
}

fn opts() -> SeriesOptions {
    SeriesOptions {
        precision: P,
        ..SeriesOptions::default()
    }
}

fn estimate(f: &LinearForm, t: &MomentTable, v: Variant, n: usize) -> mahler_core::SeriesResult {
    mahler_estimate_with(f, Some(t), v, n, &opts()).expect("estimate")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || {
        format!("took {elapsed:.1?}, limit {limit:?}")
    })
}

fn random_rational(rng: &mut StdRng) -> String {
    let num = rng.random_range(-9i64..=9);
    let den = rng.random_range(1i64..=7);
    format!("{num}/{den}")
}

fn random_form(rng: &mut StdRng) -> LinearForm {
    loop {
        let n = rng.random_range(1usize..=4);
        let coeffs: Vec<String> = (0..=n)
            .map(|_| {
                if rng.random_bool(0.3) {
                    let re = random_rational(rng);
                    let im = random_rational(rng);
                    if im.starts_with('-') {
                        format!("{re}{im}i")
                    } else {
                        format!("{re}+{im}i")
                    }
                } else {
                    random_rational(rng)
                }
            })
            .collect();
        if let Ok(f) = LinearForm::parse(&coeffs.join(",")) {
            return f;
        }
    }
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(20240601);
    let mut forms: Vec<LinearForm> = (0..20).map(|_| random_form(&mut rng)).collect();
    for n in 1..=4usize {
        forms.push(form(&vec!["1"; n + 1].join(",")));
    }
    let mut compared = 0;
    for f in &forms {
        let table = moment_table(f, 6, P);
        for k in 0..=6 {
            let brute = moment_bruteforce(f, k).map_err(|e| e.to_string())?;
            let (a, b) = (table.value(k), brute);
            ensure(a.exact().is_some() && a.exact() == b.exact(), || {
                format!(
                    "form {:?} k={k}: table {:?} brute force {:?}",
                    coeff_text(f),
                    a.exact(),
                    b.exact()
                )
            })?;
            compared += 1;
        }
    }
    let a93 = moment_table(&form("1,1,1"), 3, P).value(3);
    let a28 = moment_table(&form("1,1,1,1"), 2, P).value(2);
    let int = |v: i64| Some(BigRational::from_integer(BigInt::from(v)));
    ensure(a93.exact().cloned() == int(93), || "a(2,3,(1,1,1)) != 93".into())?;
    ensure(a28.exact().cloned() == int(28), || {
        "a(3,2,(1,1,1,1)) != 28".into()
    })?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{} forms, {compared} exact comparisons", forms.len()))
}

fn coeff_text(f: &LinearForm) -> String {
    f.coefficients()
        .iter()
        .map(|c| c.text())
        .collect::<Vec<_>>()
        .join(",")
}

fn criterion_2() -> Check {
    let mut notes = Vec::new();
    for (coeffs, reference, tol) in [
        ("1,1,1", smyth_three_ones(P).to_f64(), 1e-5),
        ("1,1,1,1", smyth_four_ones(P).to_f64(), 1e-4),
    ] {
        let start = Instant::now();
        let r = mahler_jensen_quadrature(&form(coeffs), mahler_core::oracle::DEFAULT_GRID_CAP)
            .map_err(|e| e.to_string())?;
        let err = (r.value - reference).abs();
        ensure(err <= tol, || {
            format!("({coeffs}): {} vs {reference}, error {err:.2e}", r.value)
        })?;
        within(start.elapsed(), Duration::from_secs(120))?;
        notes.push(format!("({coeffs}) error {err:.1e}"));
    }
    Ok(notes.join(", "))
}

fn criterion_3(s: &Shared) -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (f, t, reference) in [
        (&s.ones, &s.ones_table, s.ones_ref),
        (&s.mixed, &s.mixed_table, s.mixed_ref),
    ] {
        let g = g_elementary(f).map_err(|e| e.to_string())?;
        for n in [10, 100, 1000] {
            let r = estimate(f, t, Variant::E1, n);
            let err = (r.value.to_f64() - reference).abs();
            let bound = tail(f, TailVariant::E1, n, g).map_err(|e| e.to_string())?;
            ensure(r.certified_error == Some(bound), || {
                format!("reported certificate differs at N={n}")
            })?;
            ensure(err <= bound, || {
                format!("({}) N={n}: error {err:.3e} > tail {bound:.3e}", coeff_text(f))
            })?;
            notes.push(format!("{err:.1e}<={bound:.1e}"));
        }
    }
    within(start.elapsed(), Duration::from_secs(180))?;
    Ok(notes.join(" "))
}

fn criterion_4(s: &Shared) -> Check {
    let start = Instant::now();
    let errs: Vec<f64> = [125, 500, 2000]
        .iter()
        .map(|&n| (estimate(&s.ones, &s.ones_table, Variant::E1, n).value.to_f64() - s.ones_ref).abs())
        .collect();
    ensure(errs[2] <= 2e-2, || format!("error at N=2000 is {:.3e}", errs[2]))?;
    ensure(errs[2] < errs[1] && errs[1] < errs[0], || {
        format!("errors not decreasing: {errs:?}")
    })?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "errors at N=125,500,2000: {:.3e} {:.3e} {:.3e}",
        errs[0], errs[1], errs[2]
    ))
}

fn criterion_5(s: &Shared) -> Check {
    let start = Instant::now();
    let n = 1000;
    let mut results = Vec::new();
    for v in [
        Variant::E1,
        Variant::SEll(0),
        Variant::SEll(1),
        Variant::SEll(2),
        Variant::SEll(3),
    ] {
        let r = estimate(&s.mixed, &s.mixed_table, v, n);
        let cert = r
            .certified_error
            .ok_or_else(|| format!("{v} uncertified: {:?}", r.certificate_reason))?;
        results.push((v, r.value.to_f64(), cert));
    }
    let mut worst: f64 = 0.0;
    for (i, a) in results.iter().enumerate() {
        for b in &results[i + 1..] {
            let gap = (a.1 - b.1).abs();
            ensure(gap <= a.2 + b.2, || {
                format!("{} vs {}: gap {gap:.3e} > {:.3e}", a.0, b.0, a.2 + b.2)
            })?;
            worst = worst.max(gap / (a.2 + b.2));
        }
    }
    within(start.elapsed(), Duration::from_secs(180))?;
    let vals: Vec<String> = results.iter().map(|(v, x, _)| format!("{v}={x:.6}")).collect();
    Ok(format!("{}; largest gap/allowance {worst:.3}", vals.join(" ")))
}

fn criterion_6(s: &Shared) -> Check {
    let start = Instant::now();
    let e = |f, t| {
        euler_identity_residual_with(f, t, K, P)
            .map(|r| r.to_f64())
            .map_err(|e| e.to_string())
    };
    let r1 = e(&s.ones, &s.ones_table)?;
    let r2 = e(&s.mixed, &s.mixed_table)?;
    ensure(r1.abs() <= 5e-2 && r2.abs() <= 5e-2, || {
        format!("residuals {r1:.3e}, {r2:.3e}")
    })?;
    ensure((r1 - r2).abs() <= 1e-2, || {
        format!("residuals differ by {:.3e}", (r1 - r2).abs())
    })?;
    let p0 = padding_identity_residual_with(&s.ones, &s.ones_table, 0, K, P).map_err(|e| e.to_string())?;
    ensure(p0.is_zero(), || {
        format!("m=0 padding residual is {}", p0.to_f64())
    })?;
    let p1 = padding_identity_residual_with(&s.ones, &s.ones_table, 1, K, P)
        .map_err(|e| e.to_string())?
        .to_f64();
    ensure(p1.abs() <= 5e-2, || format!("m=1 padding residual {p1:.3e}"))?;
    Ok(format!(
        "J={K}: residuals {r1:.3e} and {r2:.3e}, padding m=1 {p1:.3e}, m=0 exactly 0 ({:.1?})",
        start.elapsed()
    ))
}

fn criterion_7(s: &Shared) -> Check {
    let mut notes = Vec::new();
    for f in [&s.ones, &s.mixed] {
        let d = mahler_via_density(f).map_err(|e| e.to_string())?;
        let q =
            mahler_jensen_quadrature(f, mahler_core::oracle::DEFAULT_GRID_CAP).map_err(|e| e.to_string())?;
        let name = coeff_text(f);
        ensure((d.normalization - 1.0).abs() <= 1e-6, || {
            format!("({name}) density integrates to {}", d.normalization)
        })?;
        let gap = (d.oracle.value - q.value).abs();
        ensure(gap <= 1e-3, || {
            format!("({name}) density {} vs quadrature {}", d.oracle.value, q.value)
        })?;
        let dd = f.l1().to_f64();
        for u in [dd * 1.0001, dd + 1.0, 10.0 * dd] {
            let cdf = walk_cdf(f, u).map_err(|e| e.to_string())?;
            ensure(cdf == 1.0, || format!("({name}) F({u}) = {cdf}"))?;
        }
        notes.push(format!(
            "({name}) norm-1={:.1e} gap={gap:.1e}",
            d.normalization - 1.0
        ));
    }
    Ok(notes.join(", "))
}

fn binom(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| {
        acc * BigInt::from(n - i) / BigInt::from(i + 1)
    })
}

fn criterion_8() -> Check {
    // |J0(2x)| <= max(1, pi x)^(-1/2)
    for i in 0..1000 {
        let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 999.0);
        let lhs = j0(2.0 * x).abs();
        let rhs = (std::f64::consts::PI * x).max(1.0).powf(-0.5);
        ensure(lhs <= rhs, || {
            format!("J0 envelope fails at x={x}: {lhs} > {rhs}")
        })?;
    }
    // (1-x^2)^(1/4) |P_j(x)| <= sqrt(4/pi) / sqrt(2j+1)
    let c = (4.0 / std::f64::consts::PI).sqrt();
    for j in 1..=500usize {
        let bound = c / (2.0 * j as f64 + 1.0).sqrt();
        for i in 0..=100 {
            let x = -1.0 + i as f64 / 50.0;
            let v = (1.0 - x * x).powf(0.25) * legendre(j, x).abs();
            ensure(v <= bound * (1.0 + 1e-12), || {
                format!("Bernstein bound fails at j={j} x={x}")
            })?;
        }
    }
    // (-1)^j P_j^(l-1,0)(2x-1) = sum_k C(j+l+k-1,k) C(j,k) (-x)^k, exact right side
    let mut worst: f64 = 0.0;
    for j in 0..=30u64 {
        for l in 1..=4u64 {
            for i in 0..=20i64 {
                let xr = BigRational::new(BigInt::from(i), BigInt::from(20));
                let mut rhs = BigRational::zero();
                let mut pow = BigRational::one();
                for k in 0..=j {
                    let t = BigRational::from_integer(binom(j + l + k - 1, k) * binom(j, k)) * &pow;
                    rhs = if k % 2 == 0 { rhs + t } else { rhs - t };
                    pow *= &xr;
                }
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let lhs = sign * jacobi(j as usize, (l - 1) as u32, 2.0 * i as f64 / 20.0 - 1.0);
                let want = rhs.to_f64().unwrap();
                let rel = (lhs - want).abs() / want.abs().max(1.0);
                ensure(rel <= 1e-10, || {
                    format!("coefficient identity j={j} l={l} x={i}/20: {lhs} vs {want}")
                })?;
                worst = worst.max(rel);
            }
        }
    }
    for j in 0..=10u64 {
        for a in 0..=3u32 {
            let want = binom(j + a as u64, j).to_f64().unwrap();
            let got = jacobi(j as usize, a, 1.0);
            ensure(got == want, || format!("jacobi({j},{a},1) = {got}, want {want}"))?;
        }
    }
    Ok(format!(
        "all four suites hold; coefficient identity worst relative error {worst:.1e}"
    ))
}

fn criterion_9() -> Check {
    let n = 60;
    let ln3 = BigReal::from_i64(3, P + 32).ln();
    let tol = 2f64.powi(-(P as i32 - 8));
    let mut worst: f64 = 0.0;
    for (base, scaled) in [
        ("1,2,2,3", "3,6,6,9"),
        ("1,1,1,1", "3,3,3,3"),
        ("1/2,1,3/4i,2,1", "3/2,3,9/4i,6,3"),
    ] {
        for v in [Variant::E1, Variant::SEll(0), Variant::SEll(1), Variant::SEll(2)] {
            let a = mahler_estimate(&form(base), v, n, P)
                .map_err(|e| e.to_string())?
                .value;
            let b = mahler_estimate(&form(scaled), v, n, P)
                .map_err(|e| e.to_string())?
                .value;
            let gap = (&(&b - &a) - &ln3).abs().to_f64();
            ensure(gap <= tol, || {
                format!("({base}) {v}: shift misses log 3 by {gap:.3e}")
            })?;
            worst = worst.max(gap);
        }
    }
    // permutations and unimodular phases leave every moment unchanged
    let reference = mahler_estimate(&form("1,2,2,3"), Variant::E1, n, P).map_err(|e| e.to_string())?;
    for other in [
        "3,2,1,2",
        "2,3,2,1",
        "-1,2i,-2i,3",
        "1,-2,2i,-3i",
        "3/5+4/5i,2,-2,3i",
    ] {
        let r = mahler_estimate(&form(other), Variant::E1, n, P).map_err(|e| e.to_string())?;
        ensure(r.value.to_parts() == reference.value.to_parts(), || {
            format!("({other}) differs from (1,2,2,3)")
        })?;
    }
    let mut gworst: f64 = 0.0;
    for (base, scaled) in [
        ("1,1,1,1", "3,3,3,3"),
        ("1,2,2,3", "1/7,2/7,2/7,3/7"),
        ("1,2,2,3", "1000,2000,2000,3000"),
    ] {
        let g1 = g_elementary(&form(base)).map_err(|e| e.to_string())?;
        let g2 = g_elementary(&form(scaled)).map_err(|e| e.to_string())?;
        let rel = (g1 - g2).abs() / g1;
        ensure(rel <= 1e-8, || format!("G({base}) = {g1} but G({scaled}) = {g2}"))?;
        gworst = gworst.max(rel);
    }
    Ok(format!("log 3 shift within {worst:.1e}, permutations and phases bit-identical, G relative spread {gworst:.1e}"))
}

fn cli_exit(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_mahler"))
        .args(args)
        .env_remove("MAHLER_PRECISION")
        .output()
        .ok()
        .and_then(|o| o.status.code())
}

fn criterion_10(s: &Shared) -> Check {
    let start = Instant::now();
    let three = form("1,1,1");
    let n = 3000;
    let t = moment_table(&three, n, table_precision(Variant::E1, n, P));
    let r = estimate(&three, &t, Variant::E1, n);
    ensure(
        r.certified_error.is_none() && r.certificate_reason.is_some(),
        || "n=2 came back certified".into(),
    )?;
    let smyth = smyth_three_ones(P).to_f64();
    let value = r.value.to_f64();
    let flat = estimate(&s.ones, &s.ones_table, Variant::SEll(2), 200);
    ensure(
        flat.certified_error.is_none() && flat.certificate_reason.is_some(),
        || "constant-modulus S_2 came back certified".into(),
    )?;
    ensure(flat.value.to_f64().is_finite(), || {
        "constant-modulus S_2 has no value".into()
    })?;
    let code = cli_exit(&[
        "measure",
        "--coeffs",
        "1,1,1",
        "--terms",
        "20",
        "--no-check",
        "--require-certificate",
    ]);
    ensure(code == Some(3), || {
        format!("n=2 with --require-certificate exited {code:?}")
    })?;
    let code = cli_exit(&[
        "measure",
        "--coeffs",
        "1,1,1,1",
        "--variant",
        "s2",
        "--terms",
        "20",
        "--no-check",
        "--require-certificate",
    ]);
    ensure(code == Some(3), || {
        format!("constant modulus S_2 with --require-certificate exited {code:?}")
    })?;
    Ok(format!(
        "n=2 uncertified ({}); E1(3000) for (1,1,1) = {value:.10} vs Smyth {smyth:.10}, discrepancy {:.3e} (observational) ({:.1?})",
        r.certificate_reason.unwrap_or_default(),
        value - smyth,
        start.elapsed()
    ))
}

fn shared() -> Shared {
    let ones = form("1,1,1,1");
    let mixed = form("1,2,2,3");
    let prec = table_precision(Variant::E1, K, P);
    let ones_table = moment_table(&ones, K, prec);
    let mixed_table = moment_table(&mixed, K, prec);
    let q = mahler_jensen_quadrature(&mixed, mahler_core::oracle::DEFAULT_GRID_CAP).expect("quadrature");
    let d = mahler_via_density(&mixed).expect("density");
    assert!(
        (q.value - d.oracle.value).abs() < 1e-6,
        "oracles disagree on (1,2,2,3): {} vs {}",
        q.value,
        d.oracle.value
    );
    Shared {
        ones,
        mixed,
        ones_table,
        mixed_table,
        ones_ref: smyth_four_ones(P).to_f64(),
        mixed_ref: q.value,
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, start: Instant, res: Check| {
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("criterion {id:>2} PASS [{secs:7.2}s] {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>2} FAIL [{secs:7.2}s] {name}: {msg}");
            }
        }
    };
    let t = Instant::now();
    report(1, "moment oracle equivalence", t, criterion_1());
    let t = Instant::now();
    report(2, "closed-form reproduction", t, criterion_2());

    let t = Instant::now();
    let s = shared();
    println!(
        "shared moment tables (K={K}) and (1,2,2,3) reference built in {:.2?}",
        t.elapsed()
    );

    let t = Instant::now();
    report(3, "certificate conformance", t, criterion_3(&s));
    let t = Instant::now();
    report(4, "empirical convergence", t, criterion_4(&s));
    let t = Instant::now();
    report(5, "cross-formula consistency", t, criterion_5(&s));
    let t = Instant::now();
    report(6, "identity residuals", t, criterion_6(&s));
    let t = Instant::now();
    report(7, "density route", t, criterion_7(&s));
    let t = Instant::now();
    report(8, "special-function suites", t, criterion_8());
    let t = Instant::now();
    report(9, "exact symmetries at finite N", t, criterion_9());
    let t = Instant::now();
    report(10, "degenerate policy", t, criterion_10(&s));

    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria failed");
        ExitCode::FAILURE
    }
}
