//! Command-line surface for the neumann-mellin library: symbol evaluation,
//! the B0 curve, zero-free certification, oracle verification suites, and
//! the 1D Neumann solver. Every command is deterministic; primary outputs
//! are CSV (RFC-4180 style, '.' decimal, 15 significant digits) or JSON
//! with a schema version field.

use clap::{Parser, Subcommand};
use neumann_mellin::atlas::{winding_number_counted, AtlasError, StripWindow};
use neumann_mellin::symbols::Order;
use num_complex::Complex64;
use std::io::Write;
use std::process::ExitCode;

mod commands;

pub const SCHEMA: &str = include_str!("../schema/report.schema.json");
pub const SCHEMA_VERSION: &str = "1";

use commands::{b0curve, certify, solve, symbol, verify};

/// exit codes: 0 success, 1 usage, 2 mathematical pole or exclusion,
/// 3 resolution or budget
#[derive(Debug, Parser)]
#[command(
    name = "neumann-mellin",
    version,
    about = "Mellin symbols, certified zeros, and the boundary exponent of the 1D fractional Neumann problem",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate a Mellin symbol at one point
    Symbol(symbol::Args),
    /// Sweep s and emit the B0 curve as CSV
    B0Curve(b0curve::Args),
    /// Certify a window as zero-free (or count its zeros) by winding number
    Certify(certify::Args),
    /// Run an oracle verification suite and emit a JSON report
    Verify(verify::Args),
    /// Solve the 1D Neumann problem and report boundary diagnostics
    Solve(solve::Args),
    /// Print the JSON schema the report outputs validate against
    Schema,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let code = match cli.cmd {
        Cmd::Symbol(a) => symbol::run(&a),
        Cmd::B0Curve(a) => b0curve::run(&a),
        Cmd::Certify(a) => certify::run(&a),
        Cmd::Verify(a) => verify::run(&a),
        Cmd::Solve(a) => solve::run(&a),
        Cmd::Schema => {
            println!("{}", SCHEMA.trim_end());
            0
        }
    };
    ExitCode::from(code)
}

/// Format with 15 significant digits, '.' decimal separator.
pub fn fmt15(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{v:.14e}");
    // normalize "1.23000000000000e0" exponents for CSV friendliness
    s
}

/// Parse "a", "a+bi", or "a-bi" (no spaces) into a complex number.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some(body) = t.strip_suffix('i') {
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re: f64 =
                    body[..k].parse().map_err(|_| format!("bad real part in '{t}'"))?;
                let im_txt = &body[k..];
                let im: f64 = if im_txt == "+" {
                    1.0
                } else if im_txt == "-" {
                    -1.0
                } else {
                    im_txt.parse().map_err(|_| format!("bad imaginary part in '{t}'"))?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else {
                    body.parse().map_err(|_| format!("bad imaginary part in '{t}'"))?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| format!("bad number '{t}'"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Parse "v" or "start:stop:step" into an increasing list of s values.
pub fn parse_s_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => {
            let v: f64 = parts[0].parse().map_err(|_| format!("bad s '{text}'"))?;
            Ok(vec![v])
        }
        3 => {
            let start: f64 =
                parts[0].parse().map_err(|_| format!("bad range start in '{text}'"))?;
            let stop: f64 =
                parts[1].parse().map_err(|_| format!("bad range stop in '{text}'"))?;
            let step: f64 =
                parts[2].parse().map_err(|_| format!("bad range step in '{text}'"))?;
            if step <= 0.0 || stop < start {
                return Err(format!("degenerate range '{text}'"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| start + step * k as f64).collect())
        }
        _ => Err(format!("expected 'v' or 'start:stop:step', got '{text}'")),
    }
}

pub fn order_or_usage(s: f64) -> Result<Order, u8> {
    Order::new(s).map_err(|e| {
        eprintln!("error: {e}");
        1u8
    })
}

/// Worker count for sweeps: NEUMANN_MELLIN_WORKERS, defaulting to the
/// available parallelism.
pub fn worker_count() -> usize {
    std::env::var("NEUMANN_MELLIN_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Winding verdict shared by the certification paths.
pub fn window_verdict(order: Order, window: &StripWindow) -> (String, Option<(i32, usize)>, u8) {
    match winding_number_counted(order, window) {
        Ok((w, samples)) if w == 0 => ("ZERO_FREE".into(), Some((w, samples)), 0),
        Ok((w, samples)) => (format!("CONTAINS_ZEROS({w})"), Some((w, samples)), 0),
        Err(AtlasError::ZeroOnBoundary(_)) => ("BOUNDARY_FAILURE".into(), None, 2),
        Err(_) => ("BOUNDARY_FAILURE".into(), None, 3),
    }
}

pub fn write_out(path: Option<&str>, content: &str) -> u8 {
    match path {
        None => {
            print!("{content}");
            0
        }
        Some(p) => {
            match std::fs::File::create(p).and_then(|mut f| f.write_all(content.as_bytes())) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: cannot write {p}: {e}");
                    1
                }
            }
        }
    }
}
