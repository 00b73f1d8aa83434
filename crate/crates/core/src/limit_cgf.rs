//! Limiting cumulant generating function `h(u) = lim (1/t) log E[e^{u X_t}]`.
//!
//! For a non-degenerate model `h(u) = F(u, w(u))`, where `w(u)` is the root of
//! `R(u, ·)` on the branch with `∂R/∂w < 0` passing through `w(0) = w(1) = 0`.
//! For an exponential Lévy model `h` is the Lévy exponent `F(·, 0)`.

use crate::error::{Error, Result};
use crate::model::{ModelCharacteristics, ModelParams};

/// Bisection tolerance for the endpoints of the effective domain.
pub const DOMAIN_TOL: f64 = 1e-8;
/// Expansion bound beyond which an endpoint is reported as infinite.
pub const U_MAX: f64 = 1e4;

const NEWTON_MAX_ITER: usize = 60;
const MIN_CONTINUATION_STEP: f64 = 1e-9;

fn require_nondegenerate(model: &ModelCharacteristics) -> Result<()> {
    if model.is_degenerate() {
        return Err(Error::Degenerate(format!(
            "{} has R(., 0) = 0; the branch w(u) is not defined",
            model.id()
        )));
    }
    Ok(())
}

/// Root `w(u)` of `R(u, ·)` on the stable branch, `+∞` when `u` lies outside
/// the interval where the branch exists.
///
/// Heston-type models use the closed quadratic root and BNS the linear one;
/// generic models fall back to [`solve_w_continuation`].
pub fn solve_w(model: &ModelCharacteristics, u: f64) -> Result<f64> {
    require_nondegenerate(model)?;
    match model.params() {
        ModelParams::Heston(p) | ModelParams::HestonJumps { diffusion: p, .. } => Ok(
            quadratic_root(p.zeta, p.rho * p.zeta * u - p.lambda, u * u - u),
        ),
        ModelParams::Bates {
            diffusion: p,
            jumps,
        } => {
            let k = jumps.eval_re(u);
            if !k.is_finite() {
                return Ok(f64::INFINITY);
            }
            Ok(quadratic_root(
                p.zeta,
                p.rho * p.zeta * u - p.lambda,
                u * u - u + 2.0 * k,
            ))
        }
        ModelParams::Bns { lambda, .. } => Ok((u * u - u) / (2.0 * lambda)),
        ModelParams::ExpLevy { .. } => unreachable!("degenerate models rejected above"),
        ModelParams::Generic(_) => solve_w_continuation(model, u),
    }
}

/// Stable root of `½ζ²w² + χw + ½q = 0`, i.e. `(−χ − √(χ² − ζ²q))/ζ²`.
fn quadratic_root(zeta: f64, chi: f64, q: f64) -> f64 {
    let delta = chi * chi - zeta * zeta * q;
    if delta < 0.0 || !delta.is_finite() {
        return f64::INFINITY;
    }
    (-chi - delta.sqrt()) / (zeta * zeta)
}

/// `w(u)` by numerical continuation from the anchors `w(0) = 0` (for `u < 1`)
/// or `w(1) = 0` (for `u ≥ 1`), using damped Newton steps with a tangent
/// predictor. Only roots with `∂R/∂w < 0` are accepted; `+∞` is returned when
/// the branch cannot be continued up to `u`.
pub fn solve_w_continuation(model: &ModelCharacteristics, u: f64) -> Result<f64> {
    require_nondegenerate(model)?;
    let chi0 = model.chi(0.0)?;
    let chi1 = model.chi(1.0)?;
    if !(chi0 < 0.0 && chi1 < 0.0) {
        return Err(Error::Domain(format!(
            "chi(0) = {chi0}, chi(1) = {chi1}: continuation needs both negative"
        )));
    }
    if !u.is_finite() {
        return Ok(f64::INFINITY);
    }
    let anchor = if u >= 1.0 { 1.0 } else { 0.0 };
    let dir = if u >= anchor { 1.0 } else { -1.0 };
    let (mut uc, mut wc) = (anchor, 0.0);
    let mut step: f64 = 0.05;
    while (u - uc) * dir > 0.0 {
        let max_step = 0.5f64.max(0.1 * uc.abs());
        let un = if (u - uc).abs() <= step {
            u
        } else {
            uc + dir * step
        };
        let slope = -model.dr_du(uc, wc) / model.dr_dw(uc, wc);
        let guess = if slope.is_finite() {
            wc + slope * (un - uc)
        } else {
            wc
        };
        match newton_on_branch(model, un, guess) {
            Some(w) => {
                uc = un;
                wc = w;
                step = (step * 1.5).min(max_step);
            }
            None => {
                step *= 0.5;
                if step < MIN_CONTINUATION_STEP {
                    return Ok(f64::INFINITY);
                }
            }
        }
    }
    Ok(wc)
}

fn newton_on_branch(model: &ModelCharacteristics, u: f64, guess: f64) -> Option<f64> {
    let mut w = guess;
    let mut r = model.eval_r_re(u, w);
    if !r.is_finite() {
        return None;
    }
    for _ in 0..NEWTON_MAX_ITER {
        let d = model.dr_dw(u, w);
        if !(d.is_finite() && d != 0.0) {
            return None;
        }
        let full = r / d;
        // Damping: halve until |R| decreases.
        let mut lambda = 1.0;
        let (mut wn, mut rn) = (w - full, model.eval_r_re(u, w - full));
        while !(rn.is_finite() && rn.abs() < r.abs()) && lambda > 1e-6 {
            lambda *= 0.5;
            wn = w - lambda * full;
            rn = model.eval_r_re(u, wn);
        }
        if !rn.is_finite() {
            return None;
        }
        let dw = (wn - w).abs();
        w = wn;
        r = rn;
        if r == 0.0 || dw <= 4.0 * f64::EPSILON * w.abs().max(1.0) {
            break;
        }
    }
    let scale = 1.0 + u * u + w * w;
    (r.abs() < 1e-12 * scale && model.dr_dw(u, w) < 0.0).then_some(w)
}

/// Endpoints `(u₋, u₊)` of the effective domain of `h`, the maximal interval
/// around `[0, 1]` on which `F(u, w(u))` is finite.
pub fn domain_j(model: &ModelCharacteristics) -> Result<(f64, f64)> {
    if let ModelParams::ExpLevy { jumps, .. } = model.params() {
        return Ok(jumps.domain());
    }
    let finite_at = |u: f64| -> bool {
        if model.is_degenerate() {
            return model.eval_f_re(u, 0.0).is_finite();
        }
        solve_w(model, u)
            .map(|w| w.is_finite() && model.eval_f_re(u, w).is_finite())
            .unwrap_or(false)
    };
    for i in 0..=100 {
        let u = i as f64 / 100.0;
        if !finite_at(u) {
            return Err(Error::Domain(format!(
                "limit cgf is infinite at u = {u} inside [0, 1]"
            )));
        }
    }
    let search = |anchor: f64, dir: f64| -> f64 {
        let mut inside = anchor;
        let mut span = 0.5;
        loop {
            let cand = anchor + dir * span;
            if cand.abs() >= U_MAX {
                return if finite_at(dir * U_MAX) {
                    dir * f64::INFINITY
                } else {
                    bisect_edge(&finite_at, inside, dir * U_MAX)
                };
            }
            if !finite_at(cand) {
                return bisect_edge(&finite_at, inside, cand);
            }
            inside = cand;
            span *= 2.0;
        }
    };
    Ok((search(0.0, -1.0), search(1.0, 1.0)))
}

/// Shrinks `[inside, outside]` to width `DOMAIN_TOL` and returns the inner end.
fn bisect_edge(finite_at: &dyn Fn(f64) -> bool, mut inside: f64, mut outside: f64) -> f64 {
    while (outside - inside).abs() > DOMAIN_TOL {
        let mid = 0.5 * (inside + outside);
        if finite_at(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// The limiting cgf of a validated model together with its effective domain.
#[derive(Debug, Clone)]
pub struct LimitCgf {
    model: ModelCharacteristics,
    u_minus: f64,
    u_plus: f64,
    diagnostics: Vec<String>,
}

impl LimitCgf {
    /// Locates the domain and records steepness and sign diagnostics.
    pub fn new(model: ModelCharacteristics) -> Result<Self> {
        if !model.is_degenerate() {
            let report = model.validate();
            if !report.a5_holds {
                return Err(Error::Domain(format!(
                    "chi(0) = {}, chi(1) = {}: both must be negative",
                    report.chi0, report.chi1
                )));
            }
        }
        let (u_minus, u_plus) = domain_j(&model)?;
        if !(u_minus < 0.0 && u_plus > 1.0) {
            return Err(Error::Domain(format!(
                "{{0, 1}} must be interior to the domain, got ({u_minus}, {u_plus})"
            )));
        }
        let mut limit = LimitCgf {
            model,
            u_minus,
            u_plus,
            diagnostics: Vec::new(),
        };
        limit.diagnostics = limit.diagnose();
        Ok(limit)
    }

    fn diagnose(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (end, inward) in [(self.u_minus, 1.0), (self.u_plus, -1.0)] {
            if !end.is_finite() {
                continue;
            }
            let slopes: Vec<f64> = (2..=6)
                .map(|k| {
                    self.h_prime(end + inward * 10f64.powi(-k))
                        .map_or(f64::NAN, f64::abs)
                })
                .collect();
            if !slopes.windows(2).all(|p| p[1] > p[0]) {
                out.push(format!(
                    "h' does not grow towards the endpoint {end}: {slopes:?}"
                ));
            }
        }
        if !self.model.is_degenerate() {
            for i in 1..10 {
                let u = i as f64 / 10.0;
                if self.h(u).is_nan() || self.h(u) >= 0.0 {
                    out.push(format!("h({u}) = {} is not negative", self.h(u)));
                }
            }
        }
        out
    }

    pub fn model(&self) -> &ModelCharacteristics {
        &self.model
    }

    pub fn u_minus(&self) -> f64 {
        self.u_minus
    }

    pub fn u_plus(&self) -> f64 {
        self.u_plus
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.u_minus, self.u_plus)
    }

    pub fn is_degenerate(&self) -> bool {
        self.model.is_degenerate()
    }

    /// Runtime findings from construction (non-steep endpoints, sign issues).
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    /// `w(u)`; identically zero for degenerate models.
    pub fn w(&self, u: f64) -> f64 {
        if self.model.is_degenerate() {
            return 0.0;
        }
        solve_w(&self.model, u).unwrap_or(f64::INFINITY)
    }

    /// `h(u)`, `+∞` off the closed domain.
    pub fn h(&self, u: f64) -> f64 {
        if !(u >= self.u_minus && u <= self.u_plus) {
            return f64::INFINITY;
        }
        let w = self.w(u);
        if !w.is_finite() {
            return f64::INFINITY;
        }
        let v = self.model.eval_f_re(u, w);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    /// `h'(u)` via the implicit-function rule
    /// `h' = ∂₁F + ∂₂F · w'`, `w' = −∂₁R / ∂₂R`.
    pub fn h_prime(&self, u: f64) -> Result<f64> {
        if !(u > self.u_minus && u < self.u_plus) {
            return Err(Error::Domain(format!(
                "h' requested at u = {u} outside ({}, {})",
                self.u_minus, self.u_plus
            )));
        }
        let m = &self.model;
        let d = if m.is_degenerate() {
            m.df_du(u, 0.0)
        } else {
            let w = self.w(u);
            let wp = -m.dr_du(u, w) / m.dr_dw(u, w);
            m.df_du(u, w) + m.df_dw(u, w) * wp
        };
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Domain(format!("h'({u}) is not finite")))
        }
    }

    /// Limiting cgf under the share measure, `h̃(u) = h(u + 1)`.
    pub fn h_tilde(&self, u: f64) -> f64 {
        self.h(u + 1.0)
    }
}
