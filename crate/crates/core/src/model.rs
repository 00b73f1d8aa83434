//! Affine stochastic volatility characteristics.
//!
//! An affine model (X, V) is identified by two functions of Lévy–Khintchine
//! form, `F(u, w)` (state independent) and `R(u, w)` (state dependent), such
//! that `log E[exp(u X_t + w V_t)] = φ(t,u,w) + V₀ ψ(t,u,w) + X₀ u` where
//! `∂φ/∂t = F(u, ψ)` and `∂ψ/∂t = R(u, ψ)`. Only closed-form jump transforms
//! are supported; jump measures never enter through quadrature.
//!
//! Evaluation outside the effective domain of `F` or `R` is not an error: the
//! complex evaluators return `None` and the real ones return `+∞`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for the four martingale/normalisation identities.
pub const A3_TOL: f64 = 1e-12;
/// Abscissae at which non-degeneracy is probed.
pub const A4_PROBES: [f64; 5] = [-2.0, -1.0, 0.5, 2.0, 3.0];

const COMPLEX_STEP: f64 = 1e-20;

/// First derivative of a real-analytic function at a real point by the
/// complex-step rule `Im f(x + ih) / h`.
pub(crate) fn complex_step<F>(f: F, x: f64) -> f64
where
    F: Fn(C64) -> Option<C64>,
{
    match f(C64::new(x, COMPLEX_STEP)) {
        Some(v) => v.im / COMPLEX_STEP,
        None => f64::NAN,
    }
}

fn finite(z: C64) -> Option<C64> {
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// User supplied cumulant transform with an open real-part domain.
#[derive(Clone)]
pub struct CustomJump {
    pub name: String,
    pub eval: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
    pub domain_lo: f64,
    pub domain_hi: f64,
}

/// Closed-form cumulant transform of a jump measure.
#[derive(Clone)]
pub enum JumpTransform {
    None,
    /// Compensated transform of unit-intensity exponential downward jumps,
    /// `u(u−1)/((u+α)(α+1))`, finite for `Re u > −α`.
    ExpNegative {
        alpha: f64,
    },
    /// Cumulant of a compound Poisson subordinator with intensity `a` and
    /// exponential jump sizes of rate `b`, `a u/(b−u)`, finite for `Re u < b`.
    ExpSubordinator {
        a: f64,
        b: f64,
    },
    Custom(CustomJump),
}

impl fmt::Debug for JumpTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JumpTransform::None => write!(f, "None"),
            JumpTransform::ExpNegative { alpha } => write!(f, "ExpNegative {{ alpha: {alpha} }}"),
            JumpTransform::ExpSubordinator { a, b } => {
                write!(f, "ExpSubordinator {{ a: {a}, b: {b} }}")
            }
            JumpTransform::Custom(c) => write!(
                f,
                "Custom {{ name: {:?}, domain: ({}, {}) }}",
                c.name, c.domain_lo, c.domain_hi
            ),
        }
    }
}

impl JumpTransform {
    /// Open interval of real parts on which the transform is finite.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            JumpTransform::None => (f64::NEG_INFINITY, f64::INFINITY),
            JumpTransform::ExpNegative { alpha } => (-alpha, f64::INFINITY),
            JumpTransform::ExpSubordinator { b, .. } => (f64::NEG_INFINITY, *b),
            JumpTransform::Custom(c) => (c.domain_lo, c.domain_hi),
        }
    }

    pub fn contains(&self, re: f64) -> bool {
        let (lo, hi) = self.domain();
        lo < re && re < hi
    }

    pub fn eval(&self, u: C64) -> Option<C64> {
        if !self.contains(u.re) {
            return None;
        }
        let v = match self {
            JumpTransform::None => C64::new(0.0, 0.0),
            JumpTransform::ExpNegative { alpha } => u * (u - 1.0) / ((u + alpha) * (alpha + 1.0)),
            JumpTransform::ExpSubordinator { a, b } => a * u / (b - u),
            JumpTransform::Custom(c) => (c.eval)(u),
        };
        finite(v)
    }

    pub fn eval_re(&self, u: f64) -> f64 {
        self.eval(C64::new(u, 0.0)).map_or(f64::INFINITY, |z| z.re)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        complex_step(|z| self.eval(z), u)
    }

    pub fn is_none(&self) -> bool {
        matches!(self, JumpTransform::None)
    }

    pub fn family(&self) -> &str {
        match self {
            JumpTransform::None => "none",
            JumpTransform::ExpNegative { .. } => "exp_negative",
            JumpTransform::ExpSubordinator { .. } => "exp_subordinator",
            JumpTransform::Custom(c) => &c.name,
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            JumpTransform::ExpNegative { alpha } if !(alpha > 0.0 && alpha.is_finite()) => Err(
                Error::Config(format!("exp_negative rate must be positive, got {alpha}")),
            ),
            JumpTransform::ExpSubordinator { a, b }
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) =>
            {
                Err(Error::Config(format!(
                    "exp_subordinator intensity and rate must be positive, got a={a}, b={b}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Open half-plane `cu·Re u + cw·Re w < bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlane {
    pub cu: f64,
    pub cw: f64,
    pub bound: f64,
}

/// Intersection of open half-planes in the (Re u, Re w) plane. The empty
/// intersection is the whole plane.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Region {
    pub constraints: Vec<HalfPlane>,
}

impl Region {
    pub fn whole() -> Self {
        Region::default()
    }

    pub fn contains(&self, u: f64, w: f64) -> bool {
        !(u.is_nan() || w.is_nan())
            && self
                .constraints
                .iter()
                .all(|c| c.cu * u + c.cw * w < c.bound)
    }

    /// Constraint `lo < cu·u + cw·w < hi` for a jump transform evaluated at
    /// the linear form `cu·u + cw·w`.
    fn jump_strip(jumps: &JumpTransform, cu: f64, cw: f64) -> Self {
        let (lo, hi) = jumps.domain();
        let mut constraints = Vec::new();
        if lo.is_finite() {
            constraints.push(HalfPlane {
                cu: -cu,
                cw: -cw,
                bound: -lo,
            });
        }
        if hi.is_finite() {
            constraints.push(HalfPlane { cu, cw, bound: hi });
        }
        Region { constraints }
    }
}

/// Diffusion parameters shared by the Heston family: mean-reversion rate,
/// long-run variance, vol of variance and correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HestonParams {
    pub lambda: f64,
    pub theta: f64,
    pub zeta: f64,
    pub rho: f64,
}

impl HestonParams {
    pub fn new(lambda: f64, theta: f64, zeta: f64, rho: f64) -> Self {
        HestonParams {
            lambda,
            theta,
            zeta,
            rho,
        }
    }

    fn check(&self) -> Result<()> {
        let HestonParams {
            lambda,
            theta,
            zeta,
            rho,
        } = *self;
        if !(lambda > 0.0 && theta > 0.0 && zeta > 0.0) {
            return Err(Error::Config(format!(
                "lambda, theta and zeta must be positive (got {lambda}, {theta}, {zeta})"
            )));
        }
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::Config(format!("rho must lie in (-1, 1), got {rho}")));
        }
        Ok(())
    }

    /// The diffusive part of `R`, common to Heston, Heston with jumps and Bates.
    fn r(&self, u: C64, w: C64) -> C64 {
        let HestonParams {
            lambda, zeta, rho, ..
        } = *self;
        0.5 * (u * u - u) + 0.5 * zeta * zeta * w * w - lambda * w + u * w * rho * zeta
    }
}

/// A model given directly by its characteristics.
#[derive(Clone)]
pub struct GenericModel {
    pub name: String,
    pub f: Arc<dyn Fn(C64, C64) -> C64 + Send + Sync>,
    pub r: Arc<dyn Fn(C64, C64) -> C64 + Send + Sync>,
    pub f_domain: Region,
    pub r_domain: Region,
}

impl fmt::Debug for GenericModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericModel")
            .field("name", &self.name)
            .field("f_domain", &self.f_domain)
            .field("r_domain", &self.r_domain)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum ModelParams {
    Heston(HestonParams),
    HestonJumps {
        diffusion: HestonParams,
        jumps: JumpTransform,
    },
    Bates {
        diffusion: HestonParams,
        jumps: JumpTransform,
    },
    Bns {
        lambda: f64,
        rho: f64,
        jumps: JumpTransform,
    },
    /// Exponential Lévy model with triplet (δ, σ², jumps).
    ExpLevy {
        delta: f64,
        sigma: f64,
        jumps: JumpTransform,
    },
    Generic(GenericModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Heston,
    HestonJumps,
    Bates,
    Bns,
    ExpLevy,
    Generic,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Heston => "heston",
            ModelKind::HestonJumps => "heston_jumps",
            ModelKind::Bates => "bates",
            ModelKind::Bns => "bns",
            ModelKind::ExpLevy => "exp_levy",
            ModelKind::Generic => "generic",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Immutable description of an affine model: its characteristics and their
/// effective domains.
#[derive(Debug, Clone)]
pub struct ModelCharacteristics {
    params: ModelParams,
    f_domain: Region,
    r_domain: Region,
    degenerate: bool,
}

impl ModelCharacteristics {
    pub fn heston(params: HestonParams) -> Result<Self> {
        params.check()?;
        Ok(Self::assemble(
            ModelParams::Heston(params),
            Region::whole(),
            Region::whole(),
        ))
    }

    /// Heston with state-independent jumps; `jumps` is the compensated
    /// cumulant transform of the jump part (vanishing at 0 and 1).
    pub fn heston_jumps(diffusion: HestonParams, jumps: JumpTransform) -> Result<Self> {
        diffusion.check()?;
        jumps.check()?;
        let f_domain = Region::jump_strip(&jumps, 1.0, 0.0);
        Ok(Self::assemble(
            ModelParams::HestonJumps { diffusion, jumps },
            f_domain,
            Region::whole(),
        ))
    }

    /// Bates model with jump intensity proportional to the variance.
    pub fn bates(diffusion: HestonParams, jumps: JumpTransform) -> Result<Self> {
        diffusion.check()?;
        jumps.check()?;
        let r_domain = Region::jump_strip(&jumps, 1.0, 0.0);
        Ok(Self::assemble(
            ModelParams::Bates { diffusion, jumps },
            Region::whole(),
            r_domain,
        ))
    }

    /// Barndorff-Nielsen–Shephard model driven by the subordinator with
    /// cumulant `jumps`; `rho` is the leverage coefficient of the price jumps.
    pub fn bns(lambda: f64, rho: f64, jumps: JumpTransform) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite() && rho.is_finite()) {
            return Err(Error::Config(format!(
                "bns requires lambda > 0 and finite rho (got {lambda}, {rho})"
            )));
        }
        jumps.check()?;
        if jumps.is_none() {
            return Err(Error::Config(
                "bns requires a subordinator jump transform".into(),
            ));
        }
        if !jumps.contains(rho) {
            return Err(Error::Config(format!(
                "subordinator cumulant is infinite at rho = {rho}"
            )));
        }
        let f_domain = Region::jump_strip(&jumps, rho, 1.0);
        Ok(Self::assemble(
            ModelParams::Bns { lambda, rho, jumps },
            f_domain,
            Region::whole(),
        ))
    }

    /// Exponential Lévy model whose drift is fixed by the martingale condition
    /// `h(1) = 0`.
    pub fn exp_levy(sigma: f64, jumps: JumpTransform) -> Result<Self> {
        jumps.check()?;
        let j1 = jumps.eval_re(1.0);
        if !j1.is_finite() {
            return Err(Error::Config(
                "jump transform must be finite at u = 1 for a martingale drift".into(),
            ));
        }
        Self::exp_levy_with_drift(-0.5 * sigma * sigma - j1, sigma, jumps)
    }

    pub fn exp_levy_with_drift(delta: f64, sigma: f64, jumps: JumpTransform) -> Result<Self> {
        jumps.check()?;
        if !(sigma >= 0.0 && sigma.is_finite() && delta.is_finite()) {
            return Err(Error::Config(format!(
                "exp_levy requires sigma >= 0 and finite delta (got {sigma}, {delta})"
            )));
        }
        let f_domain = Region::jump_strip(&jumps, 1.0, 0.0);
        Ok(Self::assemble(
            ModelParams::ExpLevy {
                delta,
                sigma,
                jumps,
            },
            f_domain,
            Region::whole(),
        ))
    }

    pub fn black_scholes(sigma: f64) -> Result<Self> {
        Self::exp_levy(sigma, JumpTransform::None)
    }

    pub fn generic(model: GenericModel) -> Self {
        let (f_domain, r_domain) = (model.f_domain.clone(), model.r_domain.clone());
        Self::assemble(ModelParams::Generic(model), f_domain, r_domain)
    }

    fn assemble(params: ModelParams, f_domain: Region, r_domain: Region) -> Self {
        let mut model = ModelCharacteristics {
            params,
            f_domain,
            r_domain,
            degenerate: false,
        };
        model.degenerate =
            match &model.params {
                ModelParams::ExpLevy { .. } => true,
                ModelParams::Generic(_) => A4_PROBES
                    .iter()
                    .chain([-0.5, 0.25, 0.75, 1.5].iter())
                    .all(|&u| {
                        let r = model.eval_r_re(u, 0.0);
                        !r.is_finite() || r.abs() < A3_TOL
                    }),
                _ => false,
            };
        model
    }

    pub fn kind(&self) -> ModelKind {
        match self.params {
            ModelParams::Heston(_) => ModelKind::Heston,
            ModelParams::HestonJumps { .. } => ModelKind::HestonJumps,
            ModelParams::Bates { .. } => ModelKind::Bates,
            ModelParams::Bns { .. } => ModelKind::Bns,
            ModelParams::ExpLevy { .. } => ModelKind::ExpLevy,
            ModelParams::Generic(_) => ModelKind::Generic,
        }
    }

    /// Short identifier used in output headers.
    pub fn id(&self) -> String {
        match &self.params {
            ModelParams::Generic(g) => format!("generic:{}", g.name),
            _ => self.kind().as_str().to_string(),
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn f_domain(&self) -> &Region {
        &self.f_domain
    }

    pub fn r_domain(&self) -> &Region {
        &self.r_domain
    }

    /// True iff `R(·, 0) ≡ 0`, i.e. the model is an exponential Lévy model.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Heston-family diffusion parameters, if the model has them.
    pub fn heston_params(&self) -> Option<&HestonParams> {
        match &self.params {
            ModelParams::Heston(p)
            | ModelParams::HestonJumps { diffusion: p, .. }
            | ModelParams::Bates { diffusion: p, .. } => Some(p),
            _ => None,
        }
    }

    /// `F(u, w)`, or `None` (the +∞ marker) outside the effective domain.
    pub fn eval_f(&self, u: C64, w: C64) -> Option<C64> {
        if !self.f_domain.contains(u.re, w.re) {
            return None;
        }
        let v = match &self.params {
            ModelParams::Heston(p) | ModelParams::Bates { diffusion: p, .. } => {
                p.lambda * p.theta * w
            }
            ModelParams::HestonJumps {
                diffusion: p,
                jumps,
            } => p.lambda * p.theta * w + jumps.eval(u)?,
            ModelParams::Bns { lambda, rho, jumps } => {
                *lambda * jumps.eval(w + *rho * u)? - u * *lambda * jumps.eval_re(*rho)
            }
            ModelParams::ExpLevy {
                delta,
                sigma,
                jumps,
            } => *delta * u + 0.5 * sigma * sigma * u * u + jumps.eval(u)?,
            ModelParams::Generic(g) => (g.f)(u, w),
        };
        finite(v)
    }

    /// `R(u, w)`, or `None` outside the effective domain.
    pub fn eval_r(&self, u: C64, w: C64) -> Option<C64> {
        if !self.r_domain.contains(u.re, w.re) {
            return None;
        }
        let v = match &self.params {
            ModelParams::Heston(p) | ModelParams::HestonJumps { diffusion: p, .. } => p.r(u, w),
            ModelParams::Bates {
                diffusion: p,
                jumps,
            } => p.r(u, w) + jumps.eval(u)?,
            ModelParams::Bns { lambda, .. } => 0.5 * (u * u - u) - *lambda * w,
            ModelParams::ExpLevy { .. } => C64::new(0.0, 0.0),
            ModelParams::Generic(g) => (g.r)(u, w),
        };
        finite(v)
    }

    /// Real restriction of `F`; `+∞` outside the domain.
    pub fn eval_f_re(&self, u: f64, w: f64) -> f64 {
        self.eval_f(C64::new(u, 0.0), C64::new(w, 0.0))
            .map_or(f64::INFINITY, |z| z.re)
    }

    /// Real restriction of `R`; `+∞` outside the domain.
    pub fn eval_r_re(&self, u: f64, w: f64) -> f64 {
        self.eval_r(C64::new(u, 0.0), C64::new(w, 0.0))
            .map_or(f64::INFINITY, |z| z.re)
    }

    pub fn df_du(&self, u: f64, w: f64) -> f64 {
        complex_step(|z| self.eval_f(z, C64::new(w, 0.0)), u)
    }

    pub fn df_dw(&self, u: f64, w: f64) -> f64 {
        complex_step(|z| self.eval_f(C64::new(u, 0.0), z), w)
    }

    pub fn dr_du(&self, u: f64, w: f64) -> f64 {
        complex_step(|z| self.eval_r(z, C64::new(w, 0.0)), u)
    }

    pub fn dr_dw(&self, u: f64, w: f64) -> f64 {
        complex_step(|z| self.eval_r(C64::new(u, 0.0), z), w)
    }

    /// `χ(u) = ∂R/∂w (u, 0)`.
    pub fn chi(&self, u: f64) -> Result<f64> {
        if !self.eval_r_re(u, 0.0).is_finite() {
            return Err(Error::Domain(format!("R({u}, 0) is infinite")));
        }
        Ok(match &self.params {
            ModelParams::Heston(p)
            | ModelParams::HestonJumps { diffusion: p, .. }
            | ModelParams::Bates { diffusion: p, .. } => p.rho * p.zeta * u - p.lambda,
            ModelParams::Bns { lambda, .. } => -*lambda,
            ModelParams::ExpLevy { .. } => 0.0,
            ModelParams::Generic(_) => self.dr_dw(u, 0.0),
        })
    }

    /// Variance level used when no initial state is given: the long-run mean
    /// of the variance process.
    pub fn default_variance(&self) -> f64 {
        match &self.params {
            ModelParams::Heston(p)
            | ModelParams::HestonJumps { diffusion: p, .. }
            | ModelParams::Bates { diffusion: p, .. } => p.theta,
            // dV = -λV dt + dJ_{λt} has stationary mean E[J_1] = κ'(0).
            ModelParams::Bns { jumps, .. } => jumps.derivative(0.0),
            ModelParams::ExpLevy { .. } | ModelParams::Generic(_) => 0.0,
        }
    }

    /// Checks the normalisation, non-degeneracy and χ-sign assumptions, plus
    /// the drift, moment and steepness conditions for exponential Lévy models.
    pub fn validate(&self) -> AssumptionReport {
        let mut messages = Vec::new();
        let a3_residuals = [
            self.eval_f_re(0.0, 0.0).abs(),
            self.eval_r_re(0.0, 0.0).abs(),
            self.eval_f_re(1.0, 0.0).abs(),
            self.eval_r_re(1.0, 0.0).abs(),
        ];
        let a3_holds = a3_residuals.iter().all(|r| *r < A3_TOL);
        if !a3_holds {
            messages.push(format!(
                "normalisation identities violated: |F(0,0)|, |R(0,0)|, |F(1,0)|, |R(1,0)| = {a3_residuals:?}"
            ));
        }

        let a4_holds = A4_PROBES.iter().any(|&u| {
            let r = self.eval_r_re(u, 0.0);
            r.is_finite() && r != 0.0
        });
        if !a4_holds {
            messages.push("R(u, 0) vanishes on every probe point: model is degenerate".into());
        }

        let chi_or_inf = |u: f64| self.chi(u).unwrap_or(f64::INFINITY);
        let chi0 = chi_or_inf(0.0);
        let chi1 = chi_or_inf(1.0);
        let a5_holds = chi0 < 0.0 && chi1 < 0.0;
        if !a5_holds && !self.degenerate {
            messages.push(format!(
                "chi(0) = {chi0}, chi(1) = {chi1}: both must be negative"
            ));
        }

        let convexity_holds = self.probe_convexity();
        if !convexity_holds {
            messages.push("F or R failed the convexity spot check".into());
        }

        let levy = match &self.params {
            ModelParams::ExpLevy {
                delta,
                sigma,
                jumps,
            } => {
                let checks = levy_checks(*delta, *sigma, jumps, self);
                if !checks.drift_holds {
                    messages.push(format!(
                        "martingale drift violated: h(1) = {:e}",
                        checks.drift_residual
                    ));
                }
                if !checks.moment_holds {
                    messages.push("{0, 1} is not interior to the cumulant domain".into());
                }
                if !checks.steep_holds {
                    messages.push("Lévy exponent is not steep at its domain boundary".into());
                }
                Some(checks)
            }
            _ => None,
        };

        AssumptionReport {
            model: self.id(),
            degenerate: self.degenerate,
            a3_residuals,
            a3_holds,
            a4_holds,
            chi0,
            chi1,
            a5_holds,
            convexity_holds,
            levy,
            messages,
        }
    }

    /// Second differences of `F` and `R` along a few directions on a probe grid.
    fn probe_convexity(&self) -> bool {
        let dirs = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -0.5)];
        let step = 1e-3;
        let pts = [-0.5, 0.0, 0.25, 0.5, 1.0, 1.5];
        for &u in &pts {
            for &w in &[-0.2, 0.0, 0.2] {
                for &(du, dw) in &dirs {
                    let f = |a: f64, b: f64| self.eval_f_re(a, b);
                    let r = |a: f64, b: f64| self.eval_r_re(a, b);
                    let fns: [&dyn Fn(f64, f64) -> f64; 2] = [&f, &r];
                    for g in fns {
                        let m = g(u - step * du, w - step * dw);
                        let c = g(u, w);
                        let p = g(u + step * du, w + step * dw);
                        if !(m.is_finite() && c.is_finite() && p.is_finite()) {
                            continue;
                        }
                        let second = (p - 2.0 * c + m) / (step * step);
                        if second < -(1e-9 + 4e-16 * c.abs() / (step * step)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

fn levy_checks(
    delta: f64,
    sigma: f64,
    jumps: &JumpTransform,
    model: &ModelCharacteristics,
) -> LevyChecks {
    let h = |u: f64| model.eval_f_re(u, 0.0);
    let hp = |u: f64| model.df_du(u, 0.0);
    let drift_residual = delta + 0.5 * sigma * sigma + jumps.eval_re(1.0);
    let (lo, hi) = jumps.domain();
    let moment_holds = lo < 0.0 && hi > 1.0 && h(0.0).is_finite() && h(1.0).is_finite();

    // A finite endpoint is steep when |h'| keeps growing as it is approached;
    // an infinite one when h' grows faster than linearly in log scale.
    let steep_at = |end: f64, inward: f64| -> bool {
        if end.is_finite() {
            let vals: Vec<f64> = (2..=6)
                .map(|k| hp(end + inward * 10f64.powi(-k)).abs())
                .collect();
            vals.windows(2).all(|p| p[1] > p[0]) && vals[4] > 1e3
        } else {
            let far = -inward * 1e4;
            let near = -inward * 1e2;
            let (a, b) = (hp(far).abs(), hp(near).abs());
            a.is_finite() && a > 10.0 * b
        }
    };
    let steep_holds = steep_at(lo, 1.0) && steep_at(hi, -1.0);
    LevyChecks {
        drift_residual,
        drift_holds: drift_residual.abs() < A3_TOL,
        moment_holds,
        steep_holds,
        domain: (lo, hi),
    }
}

fn ser_ext<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("+inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn ser_ext_pair<S: Serializer>(v: &(f64, f64), s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    struct Ext(f64);
    impl Serialize for Ext {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_ext(&self.0, s)
        }
    }
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&Ext(v.0))?;
    t.serialize_element(&Ext(v.1))?;
    t.end()
}

/// Exponential Lévy specific checks.
#[derive(Debug, Clone, Serialize)]
pub struct LevyChecks {
    pub drift_residual: f64,
    pub drift_holds: bool,
    pub moment_holds: bool,
    pub steep_holds: bool,
    #[serde(serialize_with = "ser_ext_pair")]
    pub domain: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub model: String,
    pub degenerate: bool,
    pub a3_residuals: [f64; 4],
    pub a3_holds: bool,
    pub a4_holds: bool,
    #[serde(serialize_with = "ser_ext")]
    pub chi0: f64,
    #[serde(serialize_with = "ser_ext")]
    pub chi1: f64,
    pub a5_holds: bool,
    pub convexity_holds: bool,
    pub levy: Option<LevyChecks>,
    pub messages: Vec<String>,
}

impl AssumptionReport {
    /// Whether the model is usable by the asymptotic machinery.
    pub fn passed(&self) -> bool {
        let base = self.a3_holds && self.convexity_holds;
        match &self.levy {
            Some(l) => base && l.drift_holds && l.moment_holds && l.steep_holds,
            None => base && self.a4_holds && self.a5_holds,
        }
    }
}
