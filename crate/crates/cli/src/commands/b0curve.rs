use crate::{fmt15, parse_s_range, worker_count, write_out};
use clap::Parser;
use neumann_mellin::atlas::{compute_b0, AtlasError, B0Result};
use neumann_mellin::symbols::Order;
use std::sync::Mutex;

#[derive(Debug, Parser)]
pub struct Args {
    /// single value "0.5" or range "start:stop:step", inside (0.02, 0.98)
    #[arg(long)]
    s: String,
    /// output CSV path (stdout when omitted)
    #[arg(long, short)]
    output: Option<String>,
    /// include wall-clock timings; off by default so that repeated runs are
    /// byte-identical
    #[arg(long)]
    timings: bool,
}

enum RowResult {
    Ok(Box<B0Result>),
    Failed(AtlasError),
    BadOrder,
}

pub fn run(args: &Args) -> u8 {
    let svals = match parse_s_range(&args.s) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if svals.iter().any(|&s| !(0.02..=0.98).contains(&s)) {
        eprintln!("error: s values must lie in [0.02, 0.98]");
        return 1;
    }

    // distribute s values across workers; rows are gathered and sorted by s
    // so the output is order-independent
    let jobs: Vec<(usize, f64)> = svals.iter().copied().enumerate().collect();
    let results: Mutex<Vec<(usize, RowResult, u128)>> = Mutex::new(Vec::new());
    let next = std::sync::atomic::AtomicUsize::new(0);
    let workers = worker_count().min(jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if k >= jobs.len() {
                    break;
                }
                let (idx, s) = jobs[k];
                let t0 = std::time::Instant::now();
                let row = match Order::new(s) {
                    Ok(o) => match compute_b0(o) {
                        Ok(r) => RowResult::Ok(Box::new(r)),
                        Err(e) => RowResult::Failed(e),
                    },
                    Err(_) => RowResult::BadOrder,
                };
                results.lock().unwrap().push((idx, row, t0.elapsed().as_millis()));
            });
        }
    });
    let mut rows = results.into_inner().unwrap();
    rows.sort_by_key(|r| r.0);

    let mut csv = String::from(
        "s,B0,B0_im,lower_theory,upper_theory,within_theory,certified,tail_M,wallclock_ms,status\n",
    );
    for (idx, row, ms) in rows {
        let s = svals[idx];
        let ms = if args.timings { ms } else { 0 };
        match row {
            RowResult::Ok(r) => {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},ok\n",
                    fmt15(s),
                    fmt15(r.b0),
                    fmt15(r.witness.beta.im),
                    fmt15(r.lower_theory),
                    fmt15(r.upper_theory),
                    r.within_theory,
                    r.witness.certified,
                    fmt15(r.tail_m),
                    ms
                ));
            }
            RowResult::Failed(e) => {
                let status = match e {
                    AtlasError::NoZeroFound => "no_zero_found",
                    AtlasError::SubdivisionBudgetExceeded => "budget_exceeded",
                    AtlasError::ZeroOnBoundary(_) => "boundary_failure",
                    AtlasError::NewtonDiverged => "newton_diverged",
                };
                csv.push_str(&format!("{},,,,,,,,{},{}\n", fmt15(s), ms, status));
            }
            RowResult::BadOrder => {
                csv.push_str(&format!("{},,,,,,,,{},bad_order\n", fmt15(s), ms));
            }
        }
    }
    write_out(args.output.as_deref(), &csv)
}
