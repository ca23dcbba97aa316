use crate::{write_out, SCHEMA_VERSION};
use clap::Parser;
use neumann_mellin::kernel::{
    apply_l_power, kernel_k_integral, selfadjoint_check, BumpProfile,
};
use neumann_mellin::mellin::{
    dirac_pairing_check, mellin_magic_check, mellin_transform, plancherel_check, GaussProfile,
    MellinTestFunction,
};
use neumann_mellin::quad::QuadratureSpec;
use neumann_mellin::rng::SplitMix64;
use neumann_mellin::special::{complex_gamma, sin_pi};
use neumann_mellin::symbols::{c_beta, f_entire, f_symbol, g_aux, FForm, Order};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Parser)]
pub struct Args {
    /// which suite: symbols | kernel | mellin | all
    #[arg(long)]
    suite: String,
    /// fractional order s in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    /// output JSON path (stdout when omitted)
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Serialize)]
struct Report {
    schema_version: String,
    suite: String,
    s: f64,
    checks: Vec<Check>,
    pass: bool,
}

#[derive(Serialize)]
struct Check {
    name: String,
    defect: f64,
    threshold: f64,
    pass: bool,
}

fn check(name: &str, defect: f64, threshold: f64) -> Check {
    Check { name: name.into(), defect, threshold, pass: defect.is_finite() && defect <= threshold }
}

fn symbols_suite(order: Order) -> Vec<Check> {
    // identity defects on a deterministic 200-point grid
    let mut rng = SplitMix64::new(0xB0);
    let mut d_forms: f64 = 0.0;
    let mut d_sym: f64 = 0.0;
    let mut d_conj: f64 = 0.0;
    let mut d_bridge: f64 = 0.0;
    let mut d_f2: f64 = 0.0;
    let two_s = order.two_s();
    let mut tested = 0;
    while tested < 200 {
        let b = Complex64::new(rng.next_f64() * 4.0 - 2.0, rng.next_f64() * 10.0 - 5.0);
        // keep away from the pole families of f and the g poles
        let near_pole = |z: Complex64| {
            let j = ((z.re - two_s).round()).max(0.0);
            let up = (z - Complex64::new(two_s + j, 0.0)).norm();
            let k = (-1.0f64 - z.re).round().max(0.0);
            let down = (z - Complex64::new(-1.0 - k, 0.0)).norm();
            up < 1e-3 || down < 1e-3
        };
        let refl = Complex64::new(two_s - 1.0, 0.0) - b;
        if near_pole(b) || near_pole(refl) {
            continue;
        }
        tested += 1;
        let fp = f_symbol(order, b, FForm::Product).value;
        let fd = f_symbol(order, b, FForm::Difference).value;
        let scale = fp.norm().max(1e-300);
        d_forms = d_forms.max((fp - fd).norm() / scale);
        d_sym = d_sym.max((f_symbol(order, refl, FForm::Product).value - fp).norm() / scale);
        d_conj = d_conj.max((f_symbol(order, b.conj(), FForm::Product).value - fp.conj()).norm() / scale);
        let g = g_aux(order, b).expect("away from poles");
        let fe = f_entire(order, b);
        let bridge = fe + (Complex64::new(two_s, 0.0) - b) * (PI * order.s()).sin() * g;
        d_bridge = d_bridge.max(bridge.norm() / fe.norm().max(1e-300));
        let (_, f2) = neumann_mellin::symbols::f1_f2_symbols(order, b);
        let mult = -1.0 / (two_s * c_beta(order, b).expect("away from poles"));
        d_f2 = d_f2.max((f2.value - mult * fp).norm() / (mult * fp).norm().max(1e-300));
    }
    vec![
        check("f_printed_forms_agree", d_forms, 1e-10),
        check("f_reflection_symmetry", d_sym, 1e-10),
        check("f_conjugation", d_conj, 1e-10),
        check("bridge_F_eq_minus_2s_minus_beta_sin_g", d_bridge, 1e-10),
        check("f2_stated_multiple_of_f", d_f2, 1e-10),
    ]
}

fn kernel_suite(order: Order) -> Vec<Check> {
    let spec = QuadratureSpec::default();
    let mut checks = Vec::new();
    // kernel integral identity
    let ki = kernel_k_integral(order, 1.0, &spec).unwrap_or(f64::NAN);
    let want = order.c_s() / order.two_s();
    checks.push(check("kernel_integral_identity", (ki - want).abs() / want, 1e-6));
    // quadrature oracle vs closed form on the admissible real grid
    let two_s = order.two_s();
    let lo = (two_s - 1.0).max(0.0) + 0.05;
    let hi = two_s - 0.05;
    let mut worst: f64 = 0.0;
    let mut b = lo;
    while b <= hi + 1e-12 {
        let beta = Complex64::new(b, 0.0);
        let lq = apply_l_power(order, beta, 1.0, &spec).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let fc = f_symbol(order, beta, FForm::Product).value;
        worst = worst.max((lq - fc).norm() / fc.norm());
        b += 0.1;
    }
    checks.push(check("apply_L_power_vs_closed_form", worst, 1e-3));
    // self-adjointness at beta = 1.2 s (inside (0, 2s))
    let phi = BumpProfile { two_s };
    let sa = selfadjoint_check(order, 1.2 * order.s(), &phi, &spec).unwrap_or(f64::NAN);
    checks.push(check("selfadjoint_defect", sa, 1e-3));
    checks
}

fn mellin_suite(order: Order) -> Vec<Check> {
    let spec = QuadratureSpec::default();
    let mut checks = Vec::new();
    let p = GaussProfile;
    // inversion round trip at z0 = 0.5 + 0.7i
    let w = MellinTestFunction::new(&p, 0.5);
    let z0 = Complex64::new(0.5, 0.7);
    let rt = mellin_transform(|x| w.value_complex(x), z0, &spec)
        .map(|v| {
            let want = (z0 * z0 - 4.0).exp();
            (v - want).norm() / want.norm()
        })
        .unwrap_or(f64::NAN);
    checks.push(check("inversion_round_trip", rt, 1e-6));
    // exponential transform sanity
    let g = mellin_transform(|x| Complex64::new((-x).exp(), 0.0), Complex64::new(2.5, 0.0), &spec)
        .map(|v| {
            let want = complex_gamma(Complex64::new(2.5, 0.0)).unwrap();
            (v - want).norm() / want.norm()
        })
        .unwrap_or(f64::NAN);
    checks.push(check("transform_exponential_gamma", g, 1e-9));
    let d0 = dirac_pairing_check(Complex64::new(0.0, 0.0), 0, &p, &spec).unwrap_or(f64::NAN);
    checks.push(check("dirac_pairing_l0", d0, 1e-6));
    let d1 = dirac_pairing_check(Complex64::new(0.2, 0.0), 1, &p, &spec).unwrap_or(f64::NAN);
    checks.push(check("dirac_pairing_l1", d1, 1e-4));
    let pl = plancherel_check(&p, &spec).unwrap_or(f64::NAN);
    checks.push(check("plancherel_pairing", pl, 1e-5));
    // diagonalization identity at the window midpoint
    let z = Complex64::new(0.5 * ((order.two_s() - 1.0).max(0.0) + order.two_s()), 0.0);
    let mg = mellin_magic_check(order, &p, z, &spec).unwrap_or(f64::NAN);
    checks.push(check("mellin_magic", mg, 1e-2));
    checks
}

fn floor_suite() -> Vec<Check> {
    // Gamma/digamma invariant floor
    let z = Complex64::new(0.3, 2.0);
    let rec = {
        let lhs = complex_gamma(z + 1.0).unwrap();
        let rhs = z * complex_gamma(z).unwrap();
        (lhs - rhs).norm() / rhs.norm()
    };
    let refl = {
        let p = complex_gamma(z).unwrap() * complex_gamma(Complex64::new(1.0, 0.0) - z).unwrap()
            * sin_pi(z)
            / PI;
        (p - Complex64::new(1.0, 0.0)).norm()
    };
    let conj = {
        let a = complex_gamma(z.conj()).unwrap();
        let b = complex_gamma(z).unwrap().conj();
        (a - b).norm() / b.norm()
    };
    let stirling = {
        let y = 40.0;
        let v = complex_gamma(Complex64::new(0.5, y)).unwrap().norm() * (PI * y / 2.0).exp();
        (v / (2.0 * PI).sqrt() - 1.0).abs()
    };
    vec![
        check("gamma_recurrence", rec, 1e-12),
        check("gamma_reflection", refl, 1e-11),
        check("gamma_conjugation", conj, 1e-13),
        check("gamma_stirling_limit", stirling, 0.02),
    ]
}

pub fn run(args: &Args) -> u8 {
    let order = match Order::new(args.s) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let checks = match args.suite.as_str() {
        "symbols" => {
            let mut c = floor_suite();
            c.extend(symbols_suite(order));
            c
        }
        "kernel" => kernel_suite(order),
        "mellin" => mellin_suite(order),
        "all" => {
            let mut c = floor_suite();
            c.extend(symbols_suite(order));
            c.extend(kernel_suite(order));
            c.extend(mellin_suite(order));
            c
        }
        other => {
            eprintln!("error: unknown suite '{other}' (expected symbols | kernel | mellin | all)");
            return 1;
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    let report = Report {
        schema_version: SCHEMA_VERSION.into(),
        suite: args.suite.clone(),
        s: args.s,
        checks,
        pass,
    };
    let json = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    let w = write_out(args.output.as_deref(), &json);
    if w != 0 {
        return w;
    }
    if pass {
        0
    } else {
        2
    }
}
