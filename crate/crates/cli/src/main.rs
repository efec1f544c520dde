mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use mahler_core::Error;

use args::{Cli, Command, Format};
use commands::Ctx;
use report::{ErrorBody, ErrorReport, SCHEMA_VERSION};

const EXIT_INVALID: u8 = 2;
const EXIT_NO_CERTIFICATE: u8 = 3;
const EXIT_PRECISION: u8 = 4;

fn error_kind(e: &Error) -> (&'static str, u8) {
    match e {
        Error::CertificateUnavailable(_) => ("certificate_unavailable", EXIT_NO_CERTIFICATE),
        Error::PrecisionFailure { .. } => ("precision_failure", EXIT_PRECISION),
        Error::EmptyInput => ("empty_input", EXIT_INVALID),
        Error::AllZero => ("all_zero", EXIT_INVALID),
        Error::MalformedToken { .. } => ("malformed_token", EXIT_INVALID),
        Error::UnknownConstant(_) => ("unknown_constant", EXIT_INVALID),
        Error::TooManyTerms { .. } => ("too_many_terms", EXIT_INVALID),
        Error::InvalidArgument(_) => ("invalid_argument", EXIT_INVALID),
        Error::DimensionMismatch { .. } => ("dimension_mismatch", EXIT_INVALID),
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Measure(_) => "measure",
        Command::Oracle(_) => "oracle",
        Command::Moments(_) => "moments",
        Command::Bound(_) => "bound",
        Command::Identity(_) => "identity",
        Command::Lognorm(_) => "lognorm",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    let format = match (cli.json, cli.csv) {
        (true, _) => Format::Json,
        (_, true) => Format::Csv,
        _ => cli.format.unwrap_or(Format::Table),
    };
    let ctx = Ctx {
        precision: cli.precision,
        threads: cli
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1),
    };
    let name = subcommand_name(&cli.command);
    let start = Instant::now();
    let result = match &cli.command {
        Command::Measure(a) => commands::measure(a, &ctx),
        Command::Oracle(a) => commands::oracle(a, &ctx),
        Command::Moments(a) => commands::moments(a, &ctx),
        Command::Bound(a) => commands::bound(a, &ctx),
        Command::Identity(a) => commands::identity(a, &ctx),
        Command::Lognorm(a) => commands::lognorm(a, &ctx),
    };
    let mut out = std::io::stdout().lock();
    match result {
        Ok(mut outcome) => {
            outcome.report.runtime_ms = start.elapsed().as_millis() as u64;
            for w in &outcome.report.warnings {
                eprintln!("warning: {w}");
            }
            let text = match (format, &outcome.rows) {
                (Format::Json, _) => outcome.report.to_json() + "\n",
                (Format::Csv, Some(rows)) => csv_text(rows),
                (Format::Csv, None) => {
                    eprintln!("error: CSV output is only available for `moments`");
                    return ExitCode::from(EXIT_INVALID);
                }
                (Format::Table, Some(rows)) => table_text(rows),
                (Format::Table, None) => outcome.report.to_table(),
            };
            let _ = out.write_all(text.as_bytes());
            if outcome.missing_certificate {
                if let Some(reason) = &outcome.report.certificate_reason {
                    eprintln!("certificate unavailable: {reason}");
                }
                ExitCode::from(EXIT_NO_CERTIFICATE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let (kind, code) = error_kind(&e);
            if format == Format::Json {
                let rep = ErrorReport {
                    schema_version: SCHEMA_VERSION,
                    subcommand: name,
                    error: ErrorBody {
                        kind,
                        message: e.to_string(),
                        exit_code: code as i32,
                    },
                };
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&rep).expect("serializes"));
            }
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

/// Clap failures, reported as JSON when `--json` appears on the command line.
fn usage_error(e: clap::Error) -> ExitCode {
    use clap::error::ErrorKind;
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion)
        || !std::env::args().any(|a| a == "--json")
    {
        e.exit();
    }
    let name = std::env::args().nth(1).unwrap_or_default();
    let rep = ErrorReport {
        schema_version: SCHEMA_VERSION,
        subcommand: &name,
        error: ErrorBody {
            kind: "invalid_argument",
            message: e
                .to_string()
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_string(),
            exit_code: EXIT_INVALID as i32,
        },
    };
    println!("{}", serde_json::to_string_pretty(&rep).expect("serializes"));
    let _ = e.print();
    ExitCode::from(EXIT_INVALID)
}

fn csv_text(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn table_text(rows: &[Vec<String>]) -> String {
    let cols = rows.first().map_or(0, |r| r.len());
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect();
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    s
}
