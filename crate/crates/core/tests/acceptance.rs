//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them). Every tolerance is pinned in code.

use neumann_mellin::atlas::{
    compute_b0, isolate_zeros, real_zero_scan, solve_s_half_special, tail_bound_m,
    winding_number, Endpoint, StripWindow,
};
use neumann_mellin::kernel::{
    apply_l_power, kernel_k_integral, selfadjoint_check, BumpProfile,
};
use neumann_mellin::mellin::{
    dirac_pairing_check, mellin_magic_check, mellin_transform, GaussProfile, MellinTestFunction,
};
use neumann_mellin::quad::QuadratureSpec;
use neumann_mellin::rng::SplitMix64;
use neumann_mellin::solver::{
    fit_boundary_exponent, normal_derivative_check, oscillatory_residual, solve_neumann,
    GradedMesh, MeshEndpoint, ResidualOperator,
};
use neumann_mellin::special::{complex_gamma, digamma, sin_pi};
use neumann_mellin::symbols::{c_beta, f1_f2_symbols, f_entire, f_symbol, g_aux, FForm, Order};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::time::Instant;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Gate {
    name: &'static str,
    t0: Instant,
    failures: Vec<String>,
}

impl Gate {
    fn new(name: &'static str) -> Self {
        Gate { name, t0: Instant::now(), failures: Vec::new() }
    }

    fn check(&mut self, label: &str, ok: bool, detail: String) {
        if !ok {
            self.failures.push(format!("{label}: {detail}"));
        }
    }

    fn finish(self, runtime_limit: Option<f64>) {
        let secs = self.t0.elapsed().as_secs_f64();
        let mut failures = self.failures;
        if let Some(lim) = runtime_limit {
            if secs >= lim {
                failures.push(format!("runtime {secs:.1}s exceeded {lim}s"));
            }
        }
        if failures.is_empty() {
            println!("ACCEPTANCE {}: PASS ({secs:.2}s)", self.name);
        } else {
            println!("ACCEPTANCE {}: FAIL ({secs:.2}s) — {}", self.name, failures.join("; "));
            panic!("{} failed: {}", self.name, failures.join("; "));
        }
    }
}

#[test]
fn criterion_01_s_half_root() {
    let mut g = Gate::new("1 (s = 1/2 root)");
    let want = c(1.193292, 0.4406488);
    let r = compute_b0(Order::new(0.5).unwrap()).expect("B0 at 1/2");
    g.check(
        "compute_b0",
        (r.witness.beta.re - want.re).abs() <= 1e-5 && (r.witness.beta.im - want.im).abs() <= 1e-5,
        format!("witness {}", r.witness.beta),
    );
    let z = solve_s_half_special().expect("transcendental root");
    g.check(
        "solve_s_half_special",
        (z.re - want.re).abs() <= 1e-5 && (z.im - want.im).abs() <= 1e-5,
        format!("root {z}"),
    );
    g.finish(Some(10.0));
}

#[test]
fn criterion_02_zero_free_strips() {
    let mut g = Gate::new("2 (zero-free strips)");
    for s in [0.1, 0.2, 0.3, 0.4] {
        let o = Order::new(s).unwrap();
        let m = tail_bound_m(o);
        let w = StripWindow::new(1e-3, 2.0 * s + 0.02, 1e-3, m);
        let winding = winding_number(o, &w);
        g.check(
            &format!("low strip s={s}"),
            matches!(winding, Ok(0)),
            format!("{winding:?}"),
        );
        // the real segment holds no nontrivial zeros; the trivial one at 0
        // is whitelisted by F(0) = 0
        let zeros = real_zero_scan(o, 1e-3, 2.0 * s + 0.02);
        g.check(&format!("real scan s={s}"), zeros.is_empty(), format!("{zeros:?}"));
        g.check(
            &format!("trivial zero at 0, s={s}"),
            f_entire(o, c(0.0, 0.0)).norm() < 1e-12,
            "F(0) != 0".into(),
        );
    }
    for s in [0.6, 0.7, 0.8, 0.9] {
        let o = Order::new(s).unwrap();
        let m = tail_bound_m(o);
        let w = StripWindow::new(2.0 * s - 1.0 + 1e-3, s + 0.52, 1e-3, m);
        let winding = winding_number(o, &w);
        g.check(
            &format!("high strip s={s}"),
            matches!(winding, Ok(0)),
            format!("{winding:?}"),
        );
        let zeros = real_zero_scan(o, 2.0 * s - 1.0 + 1e-3, s + 0.52);
        g.check(&format!("real scan s={s}"), zeros.is_empty(), format!("{zeros:?}"));
        g.check(
            &format!("trivial zero at 2s-1, s={s}"),
            f_entire(o, c(2.0 * s - 1.0, 0.0)).norm() < 1e-12,
            "F(2s-1) != 0".into(),
        );
    }
    g.finish(Some(60.0));
}

#[test]
fn criterion_03_existence_strips() {
    let mut g = Gate::new("3 (existence strips)");
    for s in [0.1, 0.25, 0.4] {
        let o = Order::new(s).unwrap();
        let m = tail_bound_m(o);
        let w = StripWindow::new(2.0 * s, 2.0 * s + 0.5, 0.0, m);
        let zeros = isolate_zeros(o, &w).expect("isolation");
        g.check(&format!("low existence s={s}"), !zeros.is_empty(), "no zero found".into());
    }
    for s in [0.6, 0.75, 0.9] {
        let o = Order::new(s).unwrap();
        let m = tail_bound_m(o);
        let w = StripWindow::new(s + 0.5, s + 1.0, 0.0, m);
        let zeros = isolate_zeros(o, &w).expect("isolation");
        g.check(&format!("high existence s={s}"), !zeros.is_empty(), "no zero found".into());
    }
    g.finish(None);
}

#[test]
fn criterion_04_b0_theory_bounds_sweep() {
    let mut g = Gate::new("4 (B0 theory bounds, 17-point sweep)");
    let mut s = 0.1;
    while s <= 0.9 + 1e-9 {
        let o = Order::new(s).unwrap();
        let r = compute_b0(o).expect("B0");
        let lower = (2.0 * s).min(s + 0.5);
        let upper = (2.0 * s + 0.5).min(s + 1.0);
        g.check(
            &format!("s={s:.2}"),
            r.b0 > lower && r.b0 < upper && r.within_theory,
            format!("B0 = {} not in ({lower}, {upper})", r.b0),
        );
        s += 0.05;
    }
    let r = compute_b0(Order::new(0.05).unwrap()).expect("B0");
    g.check("B0(0.05) < 0.55", r.b0 < 0.55, format!("B0 = {}", r.b0));
    let r = compute_b0(Order::new(0.95).unwrap()).expect("B0");
    g.check("B0(0.95) < 1.90", r.b0 < 1.90, format!("B0 = {}", r.b0));
    g.finish(Some(300.0));
}

#[test]
fn criterion_05_endpoint_asymptotics() {
    let mut g = Gate::new("5 (endpoint asymptotics)");
    let o = Order::new(0.99).unwrap();
    let witness = compute_b0(o).expect("B0").witness.beta;
    let est = neumann_mellin::atlas::asymptotic_estimate(o, Endpoint::One);
    g.check(
        "s = 0.99 vs 1.97 + 0.141421i",
        (witness - c(1.97, 0.1414213562)).norm() <= 0.05,
        format!("witness {witness}"),
    );
    g.check(
        "estimate matches printed form",
        (est - c(1.97, 0.1414213562)).norm() <= 1e-9,
        format!("est {est}"),
    );
    let r = compute_b0(Order::new(0.05).unwrap()).expect("B0");
    g.check("|B0(0.05) - 0.15| <= 0.03", (r.b0 - 0.15).abs() <= 0.03, format!("B0 = {}", r.b0));
    g.finish(None);
}

#[test]
fn criterion_06_symbol_identities() {
    let mut g = Gate::new("6 (symbol identities, 200 random points)");
    let o = Order::new(0.6).unwrap();
    let two_s = o.two_s();
    let mut rng = SplitMix64::new(0xACCE);
    let near_pole = |z: Complex64| {
        let j = (z.re - two_s).round().max(0.0);
        let up = (z - c(two_s + j, 0.0)).norm();
        let k = (-1.0 - z.re).round().max(0.0);
        let down = (z - c(-1.0 - k, 0.0)).norm();
        up < 1e-3 || down < 1e-3
    };
    let mut worst = [0.0f64; 4];
    let mut tested = 0;
    while tested < 200 {
        let b = c(rng.next_f64() * 4.0 - 2.0, rng.next_f64() * 10.0 - 5.0);
        let refl = c(two_s - 1.0, 0.0) - b;
        if near_pole(b) || near_pole(refl) {
            continue;
        }
        tested += 1;
        let fp = f_symbol(o, b, FForm::Product).value;
        let fd = f_symbol(o, b, FForm::Difference).value;
        let scale = fp.norm().max(1e-300);
        worst[0] = worst[0].max((fp - fd).norm() / scale);
        worst[1] = worst[1].max((f_symbol(o, refl, FForm::Product).value - fp).norm() / scale);
        let fe = f_entire(o, b);
        let bridge =
            fe + (c(two_s, 0.0) - b) * (PI * o.s()).sin() * g_aux(o, b).expect("no pole");
        worst[2] = worst[2].max(bridge.norm() / fe.norm().max(1e-300));
        let (_, f2) = f1_f2_symbols(o, b);
        let mult = -1.0 / (two_s * c_beta(o, b).expect("no pole"));
        worst[3] = worst[3].max((f2.value - mult * fp).norm() / (mult * fp).norm());
    }
    g.check("printed forms agree", worst[0] <= 1e-10, format!("defect {:.2e}", worst[0]));
    g.check("f(b) = f(2s-1-b)", worst[1] <= 1e-10, format!("defect {:.2e}", worst[1]));
    g.check("F = -(2s-b) sin(pi s) g", worst[2] <= 1e-10, format!("defect {:.2e}", worst[2]));
    g.check("f2 multiple of f", worst[3] <= 1e-10, format!("defect {:.2e}", worst[3]));
    g.finish(Some(5.0));
}

#[test]
fn criterion_07_quadrature_oracle() {
    let mut g = Gate::new("7 (quadrature oracle vs closed form)");
    let q = spec();
    for s in [0.3, 0.5, 0.7] {
        let o = Order::new(s).unwrap();
        let lo = (2.0 * s - 1.0).max(0.0) + 0.05;
        let hi = 2.0 * s - 0.05;
        let mut worst: f64 = 0.0;
        let mut b = lo;
        while b <= hi + 1e-12 {
            let beta = c(b, 0.0);
            let lq = apply_l_power(o, beta, 1.0, &q).expect("quadrature");
            let fc = f_symbol(o, beta, FForm::Product).value;
            worst = worst.max((lq - fc).norm() / fc.norm());
            b += 0.1;
        }
        g.check(&format!("oracle grid s={s}"), worst <= 1e-3, format!("defect {worst:.2e}"));
    }
    let o = Order::new(0.5).unwrap();
    let ki = kernel_k_integral(o, 1.0, &q).expect("kernel integral");
    let want = o.c_s() / o.two_s();
    g.check(
        "kernel identity int k(1,y) dy = c_s/(2s)",
        (ki - want).abs() / want <= 1e-6,
        format!("defect {:.2e}", (ki - want).abs() / want),
    );
    g.finish(Some(120.0));
}

#[test]
fn criterion_08_mellin_suite() {
    let mut g = Gate::new("8 (Mellin suite)");
    let q = spec();
    let p = GaussProfile;
    // inversion round trip
    let w = MellinTestFunction::new(&p, 0.5);
    let z0 = c(0.5, 0.7);
    let rt = mellin_transform(|x| w.value_complex(x), z0, &q)
        .map(|v| {
            let want = (z0 * z0 - 4.0).exp();
            (v - want).norm() / want.norm()
        })
        .expect("round trip");
    g.check("inversion round trip", rt <= 1e-6, format!("defect {rt:.2e}"));
    // Dirac pairing
    let d = dirac_pairing_check(c(0.0, 0.0), 0, &p, &q).expect("dirac");
    g.check("dirac alpha = 0", d <= 1e-5, format!("defect {d:.2e}"));
    let d = dirac_pairing_check(c(0.4, 0.9), 0, &p, &q).expect("dirac");
    g.check("dirac alpha = 0.4+0.9i", d <= 1e-5, format!("defect {d:.2e}"));
    let d = dirac_pairing_check(c(0.2, 0.0), 1, &p, &q).expect("dirac");
    g.check("dirac log case l = 1", d <= 1e-4, format!("defect {d:.2e}"));
    // diagonalization identity at two (s, z) points
    let m = mellin_magic_check(Order::new(0.5).unwrap(), &p, c(0.5, 0.0), &q).expect("magic");
    g.check("magic (0.5, 0.5)", m <= 1e-2, format!("defect {m:.2e}"));
    let m = mellin_magic_check(Order::new(0.3).unwrap(), &p, c(0.35, 0.0), &q).expect("magic");
    g.check("magic (0.3, 0.35)", m <= 1e-2, format!("defect {m:.2e}"));
    g.finish(Some(180.0));
}

#[test]
fn criterion_09_selfadjointness() {
    let mut g = Gate::new("9 (self-adjointness)");
    for (s, beta) in [(0.5, 0.6), (0.3, 0.25)] {
        let o = Order::new(s).unwrap();
        let phi = BumpProfile { two_s: o.two_s() };
        let d = selfadjoint_check(o, beta, &phi, &spec()).expect("selfadjoint");
        g.check(&format!("(s, beta) = ({s}, {beta})"), d <= 1e-3, format!("defect {d:.2e}"));
    }
    g.finish(None);
}

#[test]
fn criterion_10_oscillatory_residuals() {
    let mut g = Gate::new("10 (oscillatory/trivial residuals)");
    let q = spec();
    // trivial zero beta = 2s-1 under L at s = 0.75
    let r = oscillatory_residual(
        Order::new(0.75).unwrap(),
        c(0.5, 0.0),
        ResidualOperator::Neumann,
        &[0.5, 1.0, 2.0],
        &q,
    )
    .expect("residual");
    g.check("beta = 2s-1, s = 0.75", r <= 1e-4, format!("residual {r:.2e}"));
    // Dirichlet s-harmonic power
    let r = oscillatory_residual(
        Order::new(0.5).unwrap(),
        c(0.5, 0.0),
        ResidualOperator::Dirichlet,
        &[0.5, 1.0, 2.0],
        &q,
    )
    .expect("residual");
    g.check("beta = s Dirichlet", r <= 1e-4, format!("residual {r:.2e}"));
    // truncation-corrected identity at the s = 0.25 witness
    let o = Order::new(0.25).unwrap();
    let witness = compute_b0(o).expect("B0").witness.beta;
    let r = oscillatory_residual(o, witness, ResidualOperator::Neumann, &[1.0], &q)
        .expect("residual");
    g.check("B0 witness s = 0.25", r <= 1e-3, format!("residual {r:.2e}"));
    g.finish(None);
}

#[test]
fn criterion_11_solver_boundary_behavior() {
    let mut g = Gate::new("11 (solver boundary behavior)");
    let q = spec();
    let h = |x: f64| x - 0.5;
    // fitted exponents with the linear preset
    for s in [0.3, 0.5] {
        let o = Order::new(s).unwrap();
        let b0 = compute_b0(o).expect("B0").b0;
        let mesh = GradedMesh::new(512, 3.0).unwrap();
        let (u, _) = solve_neumann(o, h, &mesh, &q).expect("solve");
        let fit = fit_boundary_exponent(&u, MeshEndpoint::Left).expect("fit");
        let bound = (2.0 * s).min(b0) - 0.1;
        g.check(
            &format!("exponent s={s}"),
            fit.exponent >= bound,
            format!("{} < {bound}", fit.exponent),
        );
    }
    {
        let o = Order::new(0.75).unwrap();
        let mesh = GradedMesh::new(512, 3.0).unwrap();
        let (u, _) = solve_neumann(o, h, &mesh, &q).expect("solve");
        let fit = fit_boundary_exponent(&u, MeshEndpoint::Left).expect("fit");
        g.check(
            "exponent s=0.75",
            fit.exponent >= 0.75 + 0.4,
            format!("{} < 1.15", fit.exponent),
        );
        // normal derivative decreases monotonically under refinement
        let mut slopes = Vec::new();
        for n in [128usize, 256, 512] {
            let mesh = GradedMesh::new(n, 3.0).unwrap();
            let (u, _) = solve_neumann(o, h, &mesh, &q).expect("solve");
            slopes.push(normal_derivative_check(&u, MeshEndpoint::Left));
        }
        g.check(
            "normal derivative decreasing",
            slopes[0] > slopes[1] && slopes[1] > slopes[2],
            format!("{slopes:?}"),
        );
        g.check("final slope small", slopes[2] <= 0.15, format!("{}", slopes[2]));
    }
    g.finish(Some(600.0));
}

#[test]
fn criterion_12_special_function_floor() {
    let mut g = Gate::new("12 (special-function floor)");
    let z = c(0.3, 2.0);
    let rec = {
        let lhs = complex_gamma(z + 1.0).unwrap();
        let rhs = z * complex_gamma(z).unwrap();
        (lhs - rhs).norm() / rhs.norm()
    };
    g.check("recurrence", rec <= 1e-12, format!("{rec:.2e}"));
    let mut rng = SplitMix64::new(12);
    let mut worst_refl: f64 = 0.0;
    let mut worst_conj: f64 = 0.0;
    for _ in 0..50 {
        let z = c(rng.next_f64() * 10.0 - 5.0, rng.next_f64() * 40.0 - 20.0);
        if (z.re - z.re.round()).abs() < 1e-3 && z.im.abs() < 1e-3 {
            continue;
        }
        let p = complex_gamma(z).unwrap() * complex_gamma(c(1.0, 0.0) - z).unwrap() * sin_pi(z)
            / PI;
        worst_refl = worst_refl.max((p - c(1.0, 0.0)).norm());
        let a = complex_gamma(z.conj()).unwrap();
        let b = complex_gamma(z).unwrap().conj();
        worst_conj = worst_conj.max((a - b).norm() / b.norm());
    }
    g.check("reflection", worst_refl <= 1e-11, format!("{worst_refl:.2e}"));
    g.check("conjugation", worst_conj <= 1e-13, format!("{worst_conj:.2e}"));
    let y = 40.0;
    let stirl = complex_gamma(c(0.5, y)).unwrap().norm() * (PI * y / 2.0).exp();
    g.check(
        "Stirling limit at |Im| = 40 within 2%",
        (stirl / (2.0 * PI).sqrt() - 1.0).abs() < 0.02,
        format!("{stirl}"),
    );
    let d = digamma(c(0.7, 1.3)).unwrap();
    let rec_d = (digamma(c(0.7, 1.3) + 1.0).unwrap() - d - 1.0 / c(0.7, 1.3)).norm();
    g.check("digamma recurrence", rec_d <= 1e-10, format!("{rec_d:.2e}"));
    g.finish(Some(5.0));
}
