use crate::{fmt15, order_or_usage, write_out, SCHEMA_VERSION};
use clap::Parser;
use neumann_mellin::quad::QuadratureSpec;
use neumann_mellin::solver::{
    assemble_operator, fit_boundary_exponent, normal_derivative_check, solve_neumann_with,
    GradedMesh, MeshEndpoint, SolverError,
};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Parser)]
pub struct Args {
    /// fractional order s in (0, 1)
    #[arg(long)]
    s: f64,
    /// source preset: linear | sine | custom-file
    #[arg(long, default_value = "linear")]
    preset: String,
    /// path to a file with one source value per mesh cell (custom-file)
    #[arg(long)]
    source: Option<String>,
    /// number of mesh cells (even, >= 16)
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// mesh grading exponent
    #[arg(long, default_value_t = 3.0)]
    grading: f64,
    /// CSV field-dump path (stdout when omitted; diagnostics then go to stderr)
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Serialize)]
struct Diagnostics {
    schema_version: String,
    s: f64,
    n: usize,
    grading: f64,
    preset: String,
    fitted_exponent_left: Option<f64>,
    fitted_exponent_right: Option<f64>,
    fit_r2_left: Option<f64>,
    fit_r2_right: Option<f64>,
    boundary_slope_left: f64,
    boundary_slope_right: f64,
    residual: f64,
    warnings: Vec<String>,
}

pub fn run(args: &Args) -> u8 {
    let order = match order_or_usage(args.s) {
        Ok(o) => o,
        Err(c) => return c,
    };
    let mesh = match GradedMesh::new(args.n, args.grading) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    let source: Box<dyn Fn(f64) -> f64> = match args.preset.as_str() {
        "linear" => Box::new(|x: f64| x - 0.5),
        "sine" => Box::new(|x: f64| (2.0 * PI * x).sin()),
        "custom-file" => {
            let Some(path) = &args.source else {
                eprintln!("error: --preset custom-file requires --source <path>");
                return 1;
            };
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {path}: {e}");
                    return 1;
                }
            };
            let vals: Result<Vec<f64>, _> =
                text.split_whitespace().map(|t| t.parse::<f64>()).collect();
            let vals = match vals {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: bad source file: {e}");
                    return 1;
                }
            };
            if vals.len() != mesh.len() {
                eprintln!(
                    "error: source file holds {} values but the mesh has {} cells",
                    vals.len(),
                    mesh.len()
                );
                return 1;
            }
            let mids = mesh.midpoints().to_vec();
            Box::new(move |x: f64| {
                let i = mids
                    .iter()
                    .enumerate()
                    .min_by(|a, b| {
                        (a.1 - x).abs().partial_cmp(&(b.1 - x).abs()).unwrap()
                    })
                    .unwrap()
                    .0;
                vals[i]
            })
        }
        other => {
            eprintln!("error: unknown preset '{other}'");
            return 1;
        }
    };

    let spec = QuadratureSpec::default();
    let a = match assemble_operator(order, &mesh, &spec) {
        Ok(a) => a,
        Err(SolverError::InsufficientResolution(m)) => {
            eprintln!("error: {m}");
            return 3;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    let (u, projected) = match solve_neumann_with(&a, &source, &mesh) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };

    // residual of A u against the projected source
    let n = mesh.len();
    let w = mesh.widths();
    let hv: Vec<f64> = mesh.midpoints().iter().map(|&x| source(x)).collect();
    let mass: f64 = w.iter().sum();
    let mean: f64 = hv.iter().zip(w).map(|(h, w)| h * w).sum::<f64>() / mass;
    let mut resid: f64 = 0.0;
    let mut hscale: f64 = 0.0;
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += a[i][j] * u.values[j];
        }
        resid = resid.max((acc - (hv[i] - mean)).abs());
        hscale = hscale.max((hv[i] - mean).abs());
    }

    let mut warnings = Vec::new();
    if projected {
        warnings.push("source violated the compatibility condition; projected to mean-zero".into());
    }
    let fit_l = fit_boundary_exponent(&u, MeshEndpoint::Left);
    let fit_r = fit_boundary_exponent(&u, MeshEndpoint::Right);
    if let Err(e) = &fit_l {
        warnings.push(format!("left exponent fit unavailable: {e}"));
    }
    if let Err(e) = &fit_r {
        warnings.push(format!("right exponent fit unavailable: {e}"));
    }

    let diag = Diagnostics {
        schema_version: SCHEMA_VERSION.into(),
        s: args.s,
        n: args.n,
        grading: args.grading,
        preset: args.preset.clone(),
        fitted_exponent_left: fit_l.as_ref().ok().map(|f| f.exponent),
        fitted_exponent_right: fit_r.as_ref().ok().map(|f| f.exponent),
        fit_r2_left: fit_l.as_ref().ok().map(|f| f.r2),
        fit_r2_right: fit_r.as_ref().ok().map(|f| f.r2),
        boundary_slope_left: normal_derivative_check(&u, MeshEndpoint::Left),
        boundary_slope_right: normal_derivative_check(&u, MeshEndpoint::Right),
        residual: resid / hscale.max(1e-300),
        warnings,
    };

    let mut csv = String::from("x,width,source,u\n");
    for i in 0..n {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt15(mesh.midpoints()[i]),
            fmt15(w[i]),
            fmt15(hv[i]),
            fmt15(u.values[i])
        ));
    }
    let json = serde_json::to_string_pretty(&diag).expect("serializable") + "\n";
    match &args.output {
        Some(path) => {
            let c = write_out(Some(path), &csv);
            if c != 0 {
                return c;
            }
            println!("{json}");
        }
        None => {
            print!("{csv}");
            eprintln!("{json}");
        }
    }
    0
}
