use crate::{fmt15, order_or_usage, parse_complex};
use clap::Parser;
use neumann_mellin::symbols::{
    c_beta, f1_f2_symbols, f_entire, f_symbol, g_aux, FForm, SymbolError,
};
use num_complex::Complex64;

#[derive(Debug, Parser)]
pub struct Args {
    /// fractional order s in (0, 1)
    #[arg(long)]
    s: f64,
    /// evaluation point, "a+bi" / "a-bi" with no spaces
    #[arg(long)]
    beta: String,
    /// which symbol: f | g | F | f1 | f2 | C
    #[arg(long)]
    which: String,
}

fn print_value(v: Complex64, pole: bool) {
    let mag = v.norm();
    let mut line = format!("{} {}", fmt15(v.re), fmt15(v.im));
    if pole {
        line.push_str("  # pole");
    } else if mag < 1e-12 {
        line.push_str("  # ~zero (|value| < 1e-12)");
    }
    println!("{line}");
}

pub fn run(args: &Args) -> u8 {
    let order = match order_or_usage(args.s) {
        Ok(o) => o,
        Err(c) => return c,
    };
    let beta = match parse_complex(&args.beta) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match args.which.as_str() {
        "f" => {
            let v = f_symbol(order, beta, FForm::Product);
            print_value(v.value, v.is_pole);
            if v.is_pole {
                return 2;
            }
        }
        "g" => match g_aux(order, beta) {
            Ok(v) => print_value(v, false),
            Err(SymbolError::PoleAt(p)) => {
                println!("pole at {} {}", fmt15(p.re), fmt15(p.im));
                return 2;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        },
        "F" => print_value(f_entire(order, beta), false),
        "f1" | "f2" => {
            let (f1, f2) = f1_f2_symbols(order, beta);
            let v = if args.which == "f1" { f1 } else { f2 };
            print_value(v.value, v.is_pole);
            if v.is_pole {
                return 2;
            }
        }
        "C" => match c_beta(order, beta) {
            Ok(v) => print_value(v, false),
            Err(SymbolError::PoleAt(p)) => {
                println!("pole at {} {}", fmt15(p.re), fmt15(p.im));
                return 2;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        },
        other => {
            eprintln!("error: unknown symbol '{other}' (expected f | g | F | f1 | f2 | C)");
            return 1;
        }
    }
    0
}
