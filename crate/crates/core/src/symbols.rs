//! Closed-form Mellin symbols of the half-line Neumann operator.
//!
//! The central object is the meromorphic function `f` with
//! `L(x^beta) = f(beta) x^{beta-2s}`, evaluated in its two printed forms,
//! together with the auxiliary `g`, the entire surrogate `F` used by the
//! root atlas, the beta-derivative of `F`, the four half-line symbols and
//! the combined pair `(f1, f2)`.
//!
//! All Gamma products are assembled in log space and exponentiated once, so
//! evaluations stay finite for imaginary parts up to a few hundred.

use crate::special::{
    complex_gamma, complex_log_gamma, cos_pi, digamma, log_sin_pi, sin_pi, SpecialError,
};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Pole tolerance for the symbol layer (coarser than the Gamma layer: the
/// symbol poles are double and amplify noise).
pub const SYMBOL_POLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolError {
    #[error("order parameter s = {0} outside (0, 1)")]
    InvalidOrder(f64),
    #[error("symbol pole at beta = {0}")]
    PoleAt(Complex64),
}

impl From<SpecialError> for SymbolError {
    fn from(e: SpecialError) -> Self {
        match e {
            SpecialError::PoleAt(z) => SymbolError::PoleAt(z),
        }
    }
}

/// The fractional order `s` together with its derived kernel constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Order {
    s: f64,
    c_1s: f64,
}

impl Order {
    pub fn new(s: f64) -> Result<Self, SymbolError> {
        if !(s > 0.0 && s < 1.0) {
            return Err(SymbolError::InvalidOrder(s));
        }
        Ok(Order { s, c_1s: Self::kernel_constant(1, s) })
    }

    /// c_{n,s} = 4^s s pi^{-n/2} Gamma(n/2 + s) / Gamma(1 - s)
    pub fn kernel_constant(n: u32, s: f64) -> f64 {
        let g1 = complex_gamma(Complex64::new(n as f64 / 2.0 + s, 0.0)).expect("argument > 0");
        let g2 = complex_gamma(Complex64::new(1.0 - s, 0.0)).expect("argument > 0");
        4f64.powf(s) * s * PI.powf(-(n as f64) / 2.0) * (g1 / g2).re
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn two_s(&self) -> f64 {
        2.0 * self.s
    }

    /// The 1D constant c_s = 4^s s Gamma(s + 1/2) / Gamma(1 - s) / sqrt(pi).
    pub fn c_s(&self) -> f64 {
        self.c_1s
    }
}

/// A symbol evaluation together with its pole report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub value: Complex64,
    pub is_pole: bool,
    pub nearest_pole: Option<Complex64>,
}

impl SymbolValue {
    fn finite(value: Complex64, nearest_pole: Option<Complex64>) -> Self {
        SymbolValue { value, is_pole: false, nearest_pole }
    }

    fn pole(at: Complex64) -> Self {
        SymbolValue {
            value: Complex64::new(f64::INFINITY, f64::INFINITY),
            is_pole: true,
            nearest_pole: Some(at),
        }
    }
}

/// Which printed form of `f` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FForm {
    /// Prefactor times the `g`-type parenthesis (second printed form).
    Product,
    /// Dirichlet term minus `2s c_s C_beta^2` (first printed form).
    Difference,
}

fn lg(z: Complex64) -> Result<Complex64, SymbolError> {
    Ok(complex_log_gamma(z)?)
}

/// Nearest pole of the families {base + j : j >= 0} and {-1 - j : j >= 0}.
fn nearest_pole_of(beta: Complex64, base: f64) -> (Complex64, f64) {
    let up = {
        let j = ((beta.re - base).round()).max(0.0);
        Complex64::new(base + j, 0.0)
    };
    let down = {
        let j = ((-1.0 - beta.re).round()).max(0.0);
        Complex64::new(-1.0 - j, 0.0)
    };
    let (du, dd) = ((beta - up).norm(), (beta - down).norm());
    if du <= dd {
        (up, du)
    } else {
        (down, dd)
    }
}

/// C_beta = Gamma(2s - beta) Gamma(beta + 1) / Gamma(1 + 2s)
///        = integral of t^beta (1 + t)^{-1-2s} over (0, infinity).
pub fn c_beta(order: Order, beta: Complex64) -> Result<Complex64, SymbolError> {
    let two_s = order.two_s();
    let (pole, dist) = nearest_pole_of(beta, two_s);
    if dist < SYMBOL_POLE_TOL {
        return Err(SymbolError::PoleAt(pole));
    }
    let two_s_c = Complex64::new(two_s, 0.0);
    let ln = lg(two_s_c - beta)? + lg(beta + 1.0)? - lg(two_s_c + 1.0)?;
    Ok(ln.exp())
}

/// The Dirichlet half-line symbol written in the reflection-stabilized form
/// Gamma(beta+1) Gamma(2s-beta) sin(pi (s - beta)) / pi, which is exactly
/// Gamma(beta+1)/Gamma(beta-2s+1) * sin(pi(beta-s))/sin(pi(beta-2s)) via
/// Gamma(2s-beta) = -pi / (Gamma(beta-2s+1) sin(pi(beta-2s))).
fn dirichlet_term(order: Order, beta: Complex64) -> Result<Complex64, SymbolError> {
    let two_s = Complex64::new(order.two_s(), 0.0);
    let s = order.s();
    let ln = lg(beta + 1.0)? + lg(two_s - beta)?;
    if beta.im.abs() > 25.0 {
        Ok((ln + log_sin_pi(Complex64::new(s, 0.0) - beta) - Complex64::new(PI.ln(), 0.0)).exp())
    } else {
        Ok(ln.exp() * sin_pi(Complex64::new(s, 0.0) - beta) / PI)
    }
}

/// The Mellin symbol of the Neumann half-line operator, in either printed
/// form. Reports (rather than rejects) the double poles at
/// beta in {2s + j} and {-1 - j}.
pub fn f_symbol(order: Order, beta: Complex64, form: FForm) -> SymbolValue {
    let two_s = order.two_s();
    let (pole, dist) = nearest_pole_of(beta, two_s);
    if dist < SYMBOL_POLE_TOL {
        return SymbolValue::pole(pole);
    }
    let near = if dist < 0.05 { Some(pole) } else { None };
    let s = order.s();
    let value = match form {
        FForm::Difference => {
            let t1 = dirichlet_term(order, beta).expect("away from poles");
            let cb = c_beta(order, beta).expect("away from poles");
            t1 - 2.0 * s.powi(2) * 4f64.powf(s) * order.c_s() / (4f64.powf(s) * s) * cb * cb
        }
        FForm::Product => {
            // prefactor Gamma(beta+1) sin(pi s) / (Gamma(beta-2s+1) sin(pi(beta-2s)))
            // evaluated through Gamma(2s-beta) = -pi / (Gamma(beta-2s+1) sin(pi(beta-2s))),
            // times the parenthesis sin(pi(beta-s))/sin(pi s) + Gamma(2s-beta)*
            // Gamma(beta+1)/Gamma(2s).
            let sps = (PI * s).sin();
            let lnpref =
                lg(beta + 1.0).unwrap() + lg(Complex64::new(two_s, 0.0) - beta).unwrap();
            let g_part = (lg(Complex64::new(two_s, 0.0) - beta).unwrap()
                + lg(beta + 1.0).unwrap()
                - lg(Complex64::new(two_s, 0.0)).unwrap())
            .exp();
            let paren = sin_pi(beta - s) / sps + g_part;
            if beta.im.abs() > 25.0 {
                // keep the prefactor in log space; the parenthesis is O(e^{pi|Im|})
                // through its sine, so exponentiate the combined logarithm.
                -((lnpref + Complex64::new((sps / PI).ln(), 0.0)) + paren.ln()).exp()
            } else {
                -(lnpref.exp() * sps / PI * paren)
            }
        }
    };
    SymbolValue::finite(value, near)
}

/// g(z) = Gamma(2s - z) Gamma(z + 1) / Gamma(2s) - sin(pi (s - z)) / sin(pi s).
///
/// Its zeros in {Re z > 0} away from 2s - N coincide with the zeros of `f`.
pub fn g_aux(order: Order, z: Complex64) -> Result<Complex64, SymbolError> {
    let two_s = order.two_s();
    let j = (z.re - two_s).round().max(0.0);
    let pole = Complex64::new(two_s + j, 0.0);
    if (z - pole).norm() < SYMBOL_POLE_TOL {
        return Err(SymbolError::PoleAt(pole));
    }
    let two_s_c = Complex64::new(two_s, 0.0);
    let gpart = (lg(two_s_c - z)? + lg(z + 1.0)? - lg(two_s_c)?).exp();
    Ok(gpart - sin_pi(Complex64::new(order.s(), 0.0) - z) / (PI * order.s()).sin())
}

/// The surrogate F(s, beta) = (2s - beta) sin(pi(s - beta))
///   - sin(pi s) Gamma(2s + 1 - beta) Gamma(beta + 1) / Gamma(2s).
///
/// Holomorphic for -1 < Re beta < 2s + 1; satisfies
/// F = -(2s - beta) sin(pi s) g(beta), and F(s, 2s) = -2s sin(pi s) != 0, so
/// its zeros in the search strip are exactly the zeros of `f`.
pub fn f_entire(order: Order, beta: Complex64) -> Complex64 {
    let s = order.s();
    let two_s = Complex64::new(order.two_s(), 0.0);
    let gam = (lg(two_s + 1.0 - beta).unwrap() + lg(beta + 1.0).unwrap()
        - lg(two_s).unwrap())
    .exp();
    (two_s - beta) * sin_pi(Complex64::new(s, 0.0) - beta) - (PI * s).sin() * gam
}

/// Analytic beta-derivative of [`f_entire`], assembled from digamma and the
/// trigonometric derivatives.
pub fn f_entire_derivative(order: Order, beta: Complex64) -> Complex64 {
    let s = order.s();
    let two_s = Complex64::new(order.two_s(), 0.0);
    let smb = Complex64::new(s, 0.0) - beta;
    let gam = (lg(two_s + 1.0 - beta).unwrap() + lg(beta + 1.0).unwrap()
        - lg(two_s).unwrap())
    .exp();
    let psi_diff = digamma(beta + 1.0).unwrap() - digamma(two_s + 1.0 - beta).unwrap();
    -sin_pi(smb) - PI * (two_s - beta) * cos_pi(smb) - (PI * s).sin() * gam * psi_diff
}

/// The four half-line symbols for the pair (L, N) = ((-Delta)^s, N^s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalflineSymbols {
    pub fl_plus: Complex64,
    pub fl_minus: Complex64,
    pub fn_plus: Complex64,
    pub fn_minus: Complex64,
}

/// fL+ = (-Delta)^s (x_+^beta)(1); fL- = fN+ = -c_s C_beta;
/// fN- = c_s / (2s), independent of beta.
pub fn halfline_symbols(order: Order, beta: Complex64) -> Result<HalflineSymbols, SymbolError> {
    let fl_plus = dirichlet_term(order, beta)?;
    let minus_cs_cb = -order.c_s() * c_beta(order, beta)?;
    Ok(HalflineSymbols {
        fl_plus,
        fl_minus: minus_cs_cb,
        fn_plus: minus_cs_cb,
        fn_minus: Complex64::new(order.c_s() / order.two_s(), 0.0),
    })
}

/// The combined symbols of the two-operator classification:
/// f1 = f and f2 = -Gamma(1 + 2s) / (2s Gamma(2s - beta) Gamma(beta + 1)) f.
pub fn f1_f2_symbols(order: Order, beta: Complex64) -> (SymbolValue, SymbolValue) {
    let f1 = f_symbol(order, beta, FForm::Product);
    if f1.is_pole {
        return (f1, SymbolValue::pole(f1.nearest_pole.unwrap()));
    }
    // f2 = -f / (2s C_beta); C_beta shares f's pole set, so away from the
    // reported poles the division is safe.
    let f2 = match c_beta(order, beta) {
        Ok(cb) => SymbolValue::finite(-f1.value / (order.two_s() * cb), f1.nearest_pole),
        Err(SymbolError::PoleAt(p)) => SymbolValue::pole(p),
        Err(_) => unreachable!(),
    };
    (f1, f2)
}
