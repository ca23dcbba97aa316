//! Adaptive Gauss-Kronrod quadrature with the endpoint transforms needed by
//! the singular kernel integrals of this crate.
//!
//! The integrator works on complex-valued integrands (real integrands wrap
//! trivially); refinement is worst-segment-first with a 15-point Kronrod
//! rule per segment. Known algebraic endpoint singularities are absorbed by
//! power substitutions rather than left to bisection.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not converge (estimate {estimate}, error {error}, budget {budget})")]
    NotConverged { estimate: f64, error: f64, budget: usize },
    #[error("integrand tail exponents indicate a divergent strip")]
    DivergentStrip,
}

/// Tolerances and structural knobs for the singular quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Radius of the symmetric principal-value ball, as a fraction of the
    /// distance from the collocation point to the domain boundary.
    pub singular_split_radius: f64,
    /// Upper cutoff T for half-line integrals before tail treatment.
    pub domain_truncation: f64,
    /// Subtract algebraic tails analytically instead of integrating them out.
    pub tail_exponent_correction: bool,
    /// Maximum number of segment refinements per integral.
    pub max_segments: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            singular_split_radius: 0.5,
            domain_truncation: 100.0,
            tail_exponent_correction: true,
            max_segments: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> bool {
        self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.singular_split_radius > 0.0
            && self.singular_split_radius < 1.0
            && self.domain_truncation >= 100.0
    }

    /// A copy with tolerances scaled by `factor` (used for refinement studies).
    pub fn scaled(&self, factor: f64) -> Self {
        QuadratureSpec {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

// 15-point Gauss-Kronrod abscissae and weights (positive half).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[7];
    for j in 0..7 {
        resasc += ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm()) * WGK[j];
    }
    resasc *= half.abs();
    let result = kronrod * half;
    let mut err = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0f64.min((200.0 * err / resasc).powf(1.5));
    }
    let min_err = 50.0 * f64::EPSILON * resabs * half.abs();
    (result, err.max(min_err))
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Adaptive integral of a complex-valued function over the finite interval
/// [a, b], returning the value together with the achieved error estimate.
pub fn integrate_complex_est<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64), QuadError> {
    if a == b {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(&f, a, b);
    heap.push(Segment { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    let mut used = 1usize;
    while total_err > spec.abs_tol.max(spec.rel_tol * total.norm()) {
        if used >= spec.max_segments {
            return Err(QuadError::NotConverged {
                estimate: total.norm(),
                error: total_err,
                budget: spec.max_segments,
            });
        }
        let worst = heap.pop().expect("heap holds at least the whole interval");
        // Within roundoff of the worst segment there is nothing left to gain.
        if worst.b - worst.a < f64::EPSILON * (worst.a.abs() + worst.b.abs() + 1e-300) {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        used += 1;
    }
    Ok((total, total_err))
}

/// Adaptive integral of a complex-valued function over the finite
/// interval [a, b].
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64, QuadError> {
    integrate_complex_est(f, a, b, spec).map(|(v, _)| v)
}

/// Adaptive integral of a real-valued function over [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64, QuadError> {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, spec).map(|v| v.re)
}

/// Integral over [a, b] of an integrand with a known algebraic factor
/// (y - a)^sigma at the left endpoint, sigma > -1. The substitution
/// y = a + (b - a) t^p with p chosen from sigma turns the singularity into
/// a C^1 endpoint. Returns value and achieved error estimate.
pub fn integrate_complex_power_left_est<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    sigma: f64,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64), QuadError> {
    assert!(sigma > -1.0, "non-integrable endpoint singularity");
    let p = (2.0 / (1.0 + sigma)).ceil().max(1.0);
    let w = b - a;
    integrate_complex_est(
        |t| {
            let y = a + w * t.powf(p);
            if y <= a || y >= b {
                return Complex64::new(0.0, 0.0);
            }
            f(y) * (w * p * t.powf(p - 1.0))
        },
        0.0,
        1.0,
        spec,
    )
}

/// Value-only variant of [`integrate_complex_power_left_est`].
pub fn integrate_complex_power_left<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    sigma: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64, QuadError> {
    integrate_complex_power_left_est(f, a, b, sigma, spec).map(|(v, _)| v)
}

/// Same as [`integrate_complex_power_left`] with the singular factor at the
/// right endpoint b.
pub fn integrate_complex_power_right<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    sigma: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64, QuadError> {
    integrate_complex_power_left(|u| f(a + b - u), a, b, sigma, spec)
}

/// Integral over [a, infinity) of an integrand decaying like
/// y^{-1-delta} (delta > 0). Substitutes y = a / u and absorbs the
/// resulting u^{delta - 1} factor. Returns value and error estimate.
pub fn integrate_complex_tail_est<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64), QuadError> {
    assert!(a > 0.0 && delta > 0.0);
    integrate_complex_power_left_est(
        |u| {
            let y = a / u;
            f(y) * (a / (u * u))
        },
        0.0,
        1.0,
        delta - 1.0,
        spec,
    )
}

/// Value-only variant of [`integrate_complex_tail_est`].
pub fn integrate_complex_tail<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64, QuadError> {
    integrate_complex_tail_est(f, a, delta, spec).map(|(v, _)| v)
}

/// Real-valued variant of [`integrate_complex_tail`].
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    integrate_complex_tail(|y| Complex64::new(f(y), 0.0), a, delta, spec).map(|v| v.re)
}

/// Integral over the whole line of a rapidly decaying smooth integrand by a
/// fixed-step trapezoid rule on [-t_max, t_max]. For analytic integrands
/// with Gaussian decay the trapezoid rule is spectrally accurate, which is
/// exactly the regime of the Mellin inversion contours.
pub fn trapezoid_line<F: Fn(f64) -> Complex64>(f: F, t_max: f64, n: usize) -> Complex64 {
    let h = 2.0 * t_max / n as f64;
    let mut acc = 0.5 * (f(-t_max) + f(t_max));
    for k in 1..n {
        acc += f(-t_max + h * k as f64);
    }
    acc * h
}
