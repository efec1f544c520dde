use mahler_core::bounds::{bound_report, TailVariant};
use mahler_core::lognorm::{lognorm_hyper, lognorm_jacobi, ProjPoint};
use mahler_core::oracle::{
    check_rvtv_bounds, mahler_jensen_quadrature, mahler_montecarlo_threaded, mahler_via_density, OracleResult,
};
use mahler_core::series::{
    euler_identity_residual_with, mahler_estimate_with, padding_identity_residual_with, table_precision,
    SeriesOptions,
};
use mahler_core::{moment_table, Error, LinearForm, Scalar, Variant};
use serde_json::{json, Map, Value};

use crate::args::{
    BoundArgs, IdentityArgs, LognormArgs, LognormForm, MeasureArgs, MomentsArgs, OracleArgs, OracleMethod,
};
use crate::report::{OracleJson, Report};

/// What a subcommand hands back to `main`.
pub struct Outcome {
    pub report: Report,
    /// Rows for CSV output, header first.
    pub rows: Option<Vec<Vec<String>>>,
    /// Set when a certificate was requested and none exists.
    pub missing_certificate: bool,
}

impl Outcome {
    fn plain(report: Report) -> Self {
        Outcome {
            report,
            rows: None,
            missing_certificate: false,
        }
    }
}

pub struct Ctx {
    pub precision: u32,
    pub threads: usize,
}

fn parse_form(text: &str, ctx: &Ctx) -> Result<LinearForm, Error> {
    LinearForm::parse_with_precision(text, ctx.precision)
}

fn fill_form(report: &mut Report, form: &LinearForm) {
    report.n = Some(form.n());
    let text: Vec<&str> = form.coefficients().iter().map(|c| c.text()).collect();
    report.coeffs = Some(text.join(","));
}

fn parse_variant(args: &MeasureArgs) -> Result<Variant, Error> {
    if args.variant.trim().eq_ignore_ascii_case("s") {
        let ell = args
            .ell
            .ok_or_else(|| Error::InvalidArgument("variant s needs --ell".into()))?;
        return Ok(Variant::SEll(ell));
    }
    let v: Variant = args.variant.parse()?;
    if let (Some(given), Some(own)) = (args.ell, v.ell()) {
        if given != own {
            return Err(Error::InvalidArgument(format!(
                "--ell {given} contradicts variant {}",
                args.variant
            )));
        }
    }
    Ok(v)
}

pub fn measure(args: &MeasureArgs, ctx: &Ctx) -> Result<Outcome, Error> {
    let form = parse_form(&args.coeffs.coeffs, ctx)?;
    let variant = parse_variant(args)?;
    let n = usize::try_from(args.terms).unwrap_or(usize::MAX);
    let opts = SeriesOptions {
        precision: ctx.precision,
        term_cap: args.term_cap,
        checkpoints: args.checkpoints,
    };
    let res = mahler_estimate_with(&form, None, variant, n, &opts)?;

    let mut r = Report::new("measure", ctx.precision);
    fill_form(&mut r, &form);
    r.variant = Some(variant.to_string());
    r.terms = Some(res.terms);
    r.ell = variant.ell();
    r.set_value(&res.value);
    r.certified_error = res.certified_error;
    r.certificate_reason = res.certificate_reason.clone();

    let value = res.value.to_f64();
    if !check_rvtv_bounds(&form, value) {
        r.warnings.push(format!(
            "estimate {value} lies outside [log||D|| - gamma/2 - 2, log||D||]"
        ));
    }
    if !args.no_check {
        r.seed = Some(args.seed);
        let mc = mahler_montecarlo_threaded(&form, args.samples, args.seed, ctx.threads)?;
        let allowed = mc.error_estimate + res.certified_error.unwrap_or(0.0);
        if (mc.value - value).abs() > allowed {
            r.warnings.push(format!(
                "Monte Carlo value {} differs from the estimate by {:.3e}, more than {:.3e}",
                mc.value,
                (mc.value - value).abs(),
                allowed
            ));
        }
        r.oracle = Some(OracleJson::from(&mc));
    }

    let mut details = Map::new();
    if args.checkpoints {
        let parts: Vec<Value> = res
            .partials
            .iter()
            .map(|(k, v)| json!({ "N": k, "value": v.to_f64() }))
            .collect();
        details.insert("partials".into(), Value::Array(parts));
    }
    r.details = Value::Object(details);
    let missing = args.require_certificate && res.certified_error.is_none();
    Ok(Outcome {
        report: r,
        rows: None,
        missing_certificate: missing,
    })
}

pub fn oracle(args: &OracleArgs, ctx: &Ctx) -> Result<Outcome, Error> {
    let form = parse_form(&args.coeffs.coeffs, ctx)?;
    let mut r = Report::new("oracle", ctx.precision);
    fill_form(&mut r, &form);
    let mut details = Map::new();
    let res: OracleResult = match args.method {
        OracleMethod::Jensen => mahler_jensen_quadrature(&form, args.grid)?,
        OracleMethod::Montecarlo => {
            r.seed = Some(args.seed);
            mahler_montecarlo_threaded(&form, args.samples, args.seed, ctx.threads)?
        }
        OracleMethod::Density => {
            let rep = mahler_via_density(&form)?;
            details.insert("normalization".into(), json!(rep.normalization));
            rep.oracle
        }
    };
    r.value = Some(res.value);
    let p = &res.params;
    for (k, v) in [
        ("grid", p.grid.map(|g| json!(g))),
        ("samples", p.samples.map(|s| json!(s))),
        ("cutoff", p.cutoff.map(|c| json!(c))),
    ] {
        if let Some(v) = v {
            details.insert(k.into(), v);
        }
    }
    r.oracle = Some(OracleJson::from(&res));
    r.details = Value::Object(details);
    Ok(Outcome::plain(r))
}

fn scalar_text(s: &Scalar, digits: usize) -> String {
    match s.exact() {
        Some(q) if q.is_integer() => q.numer().to_string(),
        Some(q) => format!("{}/{}", q.numer(), q.denom()),
        None => s
            .to_big_real(64 + (digits as f64 / std::f64::consts::LOG10_2) as u32)
            .to_decimal_string(digits),
    }
}

pub fn moments(args: &MomentsArgs, ctx: &Ctx) -> Result<Outcome, Error> {
    let form = parse_form(&args.coeffs.coeffs, ctx)?;
    let table = moment_table(&form, args.max_k, ctx.precision);
    let digits = crate::report::decimal_digits(ctx.precision).min(20);
    let mut rows = vec![vec!["k".to_string(), "a_exact".to_string(), "ratio".to_string()]];
    let mut list = Vec::new();
    for k in 0..=args.max_k {
        let a = scalar_text(&table.value(k), crate::report::decimal_digits(ctx.precision));
        let ratio = table.ratio(k).to_decimal_string(digits);
        list.push(json!({ "k": k, "a_exact": a, "ratio": ratio }));
        rows.push(vec![k.to_string(), a, ratio]);
    }
    let mut r = Report::new("moments", ctx.precision);
    fill_form(&mut r, &form);
    r.details = json!({
        "exact": table.is_exact(),
        "c_squared": scalar_text(form.csq(), 20),
        "moments": list,
    });
    Ok(Outcome {
        report: r,
        rows: Some(rows),
        missing_certificate: false,
    })
}

fn tail_name(v: TailVariant) -> String {
    match v {
        TailVariant::E1 => "e1".into(),
        TailVariant::E2 => "e2".into(),
        TailVariant::SEll(l) => format!("s{l}"),
    }
}

pub fn bound(args: &BoundArgs, ctx: &Ctx) -> Result<Outcome, Error> {
    let form = parse_form(&args.coeffs.coeffs, ctx)?;
    let rep = bound_report(&form, &args.ell, &args.terms);
    let mut r = Report::new("bound", ctx.precision);
    fill_form(&mut r, &form);
    r.value = rep.g_elementary;
    if rep.g_elementary.is_none() {
        r.certificate_reason = form
            .certificate_obstacle(None)
            .or_else(|| Some("G(n,D) is unavailable for this form".into()));
    }
    let a: Map<String, Value> = rep
        .a_factor
        .iter()
        .map(|(l, v)| (l.to_string(), json!(v)))
        .collect();
    let tails: Vec<Value> = rep
        .tails
        .iter()
        .map(|(v, n, t)| json!({ "variant": tail_name(*v), "N": n, "bound": t }))
        .collect();
    r.details = json!({
        "g_elementary": rep.g_elementary,
        "g_quadrature": rep.g_quadrature.as_ref().map(|q| json!({
            "value": q.value, "tail_slack": q.tail_slack, "cutoff": q.cutoff,
        })),
        "breakpoints": rep.breakpoints,
        "a_factor": a,
        "tails": tails,
    });
    let missing = args.require_certificate && rep.g_elementary.is_none();
    if missing {
        r.warnings
            .push("no certificate: G(n,D) needs at least four nonzero coefficients".into());
    }
    Ok(Outcome {
        report: r,
        rows: None,
        missing_certificate: missing,
    })
}

pub fn identity(args: &IdentityArgs, ctx: &Ctx) -> Result<Outcome, Error> {
    let form = parse_form(&args.coeffs.coeffs, ctx)?;
    let j = usize::try_from(args.terms).unwrap_or(usize::MAX);
    let table = moment_table(&form, j, table_precision(Variant::E1, j, ctx.precision));
    let euler = euler_identity_residual_with(&form, &table, j, ctx.precision)?;
    let pad = padding_identity_residual_with(&form, &table, args.pad, j, ctx.precision)?;
    let mut r = Report::new("identity", ctx.precision);
    fill_form(&mut r, &form);
    r.terms = Some(j);
    r.set_value(&euler);
    let digits = crate::report::decimal_digits(ctx.precision);
    r.details = json!({
        "euler_residual": euler.to_f64(),
        "padding_m": args.pad,
        "padding_residual": pad.to_f64(),
        "padding_residual_decimal": pad.to_decimal_string(digits),
    });
    Ok(Outcome::plain(r))
}

pub fn lognorm(args: &LognormArgs, ctx: &Ctx) -> Result<Outcome, Error> {
    let form = parse_form(&args.coeffs.coeffs, ctx)?;
    let z = ProjPoint::parse(&args.point)?;
    let n = usize::try_from(args.terms).unwrap_or(usize::MAX);
    let direct = mahler_core::lognorm::log_abs_sq(&z, &form)?;
    let mut r = Report::new("lognorm", ctx.precision);
    fill_form(&mut r, &form);
    r.terms = Some(n);
    let (v, kind) = match args.form {
        LognormForm::Hyper => {
            let v = lognorm_hyper(&z, &form, n)?;
            r.certified_error = Some(v.tail);
            (v, "hyper")
        }
        LognormForm::Jacobi => {
            r.ell = Some(args.ell);
            r.certificate_reason = Some("the Jacobi remainder bound is a diagnostic".into());
            (lognorm_jacobi(&z, &form, args.ell, n)?, "jacobi")
        }
    };
    r.variant = Some(kind.into());
    r.value = Some(v.value);
    r.details = json!({
        "x": v.x,
        "tail": v.tail,
        "direct": direct,
        "difference": v.value - direct,
    });
    Ok(Outcome::plain(r))
}
