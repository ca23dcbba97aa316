use crate::{order_or_usage, window_verdict, write_out, SCHEMA_VERSION};
use clap::Parser;
use neumann_mellin::atlas::{tail_bound_m, StripWindow};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Parser)]
pub struct Args {
    /// fractional order s in (0, 1)
    #[arg(long)]
    s: f64,
    #[arg(long)]
    re_min: f64,
    #[arg(long)]
    re_max: f64,
    /// lower edge of the window (defaults to 1e-3, above the real axis)
    #[arg(long, default_value_t = 1e-3)]
    im_min: f64,
    /// upper edge of the window (defaults to the certified tail bound M)
    #[arg(long)]
    im_max: Option<f64>,
    /// output JSON path (stdout when omitted)
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Serialize)]
struct Certificate {
    schema_version: String,
    s: f64,
    window: WindowOut,
    winding: Option<i32>,
    boundary_samples: Option<usize>,
    exclusions: Vec<Exclusion>,
    tail_m: f64,
    verdict: String,
}

#[derive(Serialize)]
struct WindowOut {
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
}

#[derive(Serialize)]
struct Exclusion {
    center_re: f64,
    center_im: f64,
    radius: f64,
}

pub fn run(args: &Args) -> u8 {
    let order = match order_or_usage(args.s) {
        Ok(o) => o,
        Err(c) => return c,
    };
    let tail_m = tail_bound_m(order);
    let im_max = args.im_max.unwrap_or(tail_m);
    if !(args.re_min < args.re_max) || !(args.im_min < im_max) {
        eprintln!("error: degenerate window");
        return 1;
    }
    if args.re_max >= order.two_s() + 1.0 - 1e-9 || args.re_min <= -1.0 + 1e-9 {
        eprintln!(
            "error: window must stay inside the holomorphy strip -1 < Re < 2s+1 = {}",
            order.two_s() + 1.0
        );
        return 1;
    }
    // trivial-zero discs, reported when they touch the window
    let trivial = [Complex64::new(0.0, 0.0), Complex64::new(order.two_s() - 1.0, 0.0)];
    let exclusions: Vec<Exclusion> = trivial
        .iter()
        .filter(|z| {
            z.re > args.re_min - 0.02
                && z.re < args.re_max + 0.02
                && z.im > args.im_min - 0.02
                && z.im < im_max + 0.02
        })
        .map(|z| Exclusion { center_re: z.re, center_im: z.im, radius: 0.02 })
        .collect();

    let window = StripWindow::new(args.re_min, args.re_max, args.im_min, im_max);
    let (verdict, data, code) = window_verdict(order, &window);
    let cert = Certificate {
        schema_version: SCHEMA_VERSION.into(),
        s: args.s,
        window: WindowOut {
            re_min: args.re_min,
            re_max: args.re_max,
            im_min: args.im_min,
            im_max,
        },
        winding: data.map(|d| d.0),
        boundary_samples: data.map(|d| d.1),
        exclusions,
        tail_m,
        verdict,
    };
    let json = serde_json::to_string_pretty(&cert).expect("serializable") + "\n";
    let w = write_out(args.output.as_deref(), &json);
    if w != 0 {
        return w;
    }
    code
}
