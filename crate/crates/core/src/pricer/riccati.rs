//! Generalized Riccati equations `∂φ/∂t = F(u, ψ)`, `∂ψ/∂t = R(u, ψ)`,
//! `φ(0) = ψ(0) = 0`, integrated with the Dormand–Prince 5(4) pair.

use crate::error::{Error, Result};
use crate::model::{HestonParams, ModelCharacteristics, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiConfig {
    pub rtol: f64,
    pub atol: f64,
    /// `|ψ|` above which the solution is treated as exploding.
    pub blow_up: f64,
    pub max_steps: usize,
}

impl Default for RiccatiConfig {
    fn default() -> Self {
        RiccatiConfig {
            rtol: 1e-10,
            atol: 1e-12,
            blow_up: 1e8,
            max_steps: 1_000_000,
        }
    }
}

/// `(φ(t,u,0), ψ(t,u,0))` with step statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiSolution {
    pub t: f64,
    pub u: C64,
    pub phi: C64,
    pub psi: C64,
    pub steps: usize,
    pub rejected: usize,
    /// Largest accepted scaled local error estimate (≤ 1 means within tolerance).
    pub max_error: f64,
}

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Differences between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type Y = [C64; 2];

fn axpy(y: &Y, terms: &[(f64, &Y)], h: f64) -> Y {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Integrates the Riccati system for real time `t ≥ 0` at complex `u`.
///
/// Degenerate (Lévy) models have `R ≡ 0`, so `ψ ≡ 0` and `φ = t F(u, 0)`
/// exactly; no integration is performed for them.
pub fn solve_riccati(
    model: &ModelCharacteristics,
    t: f64,
    u: C64,
    cfg: &RiccatiConfig,
) -> Result<RiccatiSolution> {
    let zero = C64::new(0.0, 0.0);
    let mut sol = RiccatiSolution {
        t,
        u,
        phi: zero,
        psi: zero,
        steps: 0,
        rejected: 0,
        max_error: 0.0,
    };
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "maturity must be finite and non-negative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(sol);
    }
    if model.is_degenerate() {
        let f = model
            .eval_f(u, zero)
            .ok_or_else(|| Error::Domain(format!("Lévy exponent is infinite at u = {u}")))?;
        sol.phi = t * f;
        return Ok(sol);
    }

    let rhs = |s: f64, y: &Y| -> Result<Y> {
        match (model.eval_f(u, y[1]), model.eval_r(u, y[1])) {
            (Some(f), Some(r)) => Ok([f, r]),
            _ => Err(Error::Domain(format!(
                "(u, psi) = ({u}, {}) left the domain of F or R at s = {s}",
                y[1]
            ))),
        }
    };

    let mut s = 0.0;
    let mut y: Y = [zero, zero];
    let mut k1 = rhs(0.0, &y)?;
    let scale0 = 1.0 + k1[1].norm() + k1[0].norm();
    let mut h = (0.01 / scale0).min(t);
    let h_min = 1e-14 * t.max(1.0);

    while s < t {
        if sol.steps + sol.rejected >= cfg.max_steps {
            return Err(Error::StepUnderflow { t: s });
        }
        if s + h > t {
            h = t - s;
        }
        let k2 = rhs(s + C2 * h, &axpy(&y, &[(A21, &k1)], h))?;
        let k3 = rhs(s + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h))?;
        let k4 = rhs(
            s + C4 * h,
            &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
        )?;
        let k5 = rhs(
            s + C5 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        )?;
        let k6 = rhs(
            s + h,
            &axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ),
        )?;
        let y_new = axpy(
            &y,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            h,
        );
        let k7 = rhs(s + h, &y_new)?;

        let mut err: f64 = 0.0;
        for i in 0..2 {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = cfg.atol + cfg.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / sc);
        }

        if err <= 1.0 {
            s += h;
            y = y_new;
            k1 = k7;
            sol.steps += 1;
            sol.max_error = sol.max_error.max(err);
            let m = y[1].norm();
            if m > cfg.blow_up {
                return Err(Error::BlowUp { t: s, modulus: m });
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            sol.rejected += 1;
            let factor = if err.is_finite() {
                (0.9 * err.powf(-0.25)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= factor;
            if h < h_min {
                return Err(Error::StepUnderflow { t: s });
            }
        }
    }
    sol.phi = y[0];
    sol.psi = y[1];
    Ok(sol)
}

/// Closed-form Heston solution `(φ(t,u,0), ψ(t,u,0))`.
///
/// With `χ = ρζu − λ`, `d = √(χ² − ζ²(u² − u))` and roots
/// `r∓ = (−χ ∓ d)/ζ²`, `g = r₋/r₊`:
/// `ψ = r₋(1 − e^{−dt})/(1 − g e^{−dt})` and
/// `φ = λθ (r₋ t − (2/ζ²) log((1 − g e^{−dt})/(1 − g)))`.
pub fn heston_closed_form(p: &HestonParams, t: f64, u: C64) -> (C64, C64) {
    let HestonParams {
        lambda,
        theta,
        zeta,
        rho,
    } = *p;
    let z2 = zeta * zeta;
    let chi = rho * zeta * u - lambda;
    let d = (chi * chi - z2 * (u * u - u)).sqrt();
    let r_minus = (-chi - d) / z2;
    let r_plus = (-chi + d) / z2;
    let g = r_minus / r_plus;
    let e = (-d * t).exp();
    let psi = r_minus * (1.0 - e) / (1.0 - g * e);
    let phi = lambda * theta * (r_minus * t - 2.0 / z2 * ((1.0 - g * e) / (1.0 - g)).ln());
    (phi, psi)
}
