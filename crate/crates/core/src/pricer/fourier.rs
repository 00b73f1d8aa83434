//! Damped-transform option pricing.
//!
//! With damping `α`, the call price at log-strike `k` is
//! `C(k) = e^{−αk}/π ∫₀^∞ Re[e^{−ivk} Ψ(v)] dv`, where
//! `Ψ(v) = E[e^{(α+1+iv) X_t}] / (α² + α − v² + iv(2α + 1))`. Any
//! `α > 0` inside the moment strip gives the call; `α < −1` gives the put.
//! `Ψ` does not depend on the strike, so a [`FourierPricer`] caches its values
//! and shares them across every strike priced at one maturity.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use crate::asymptotics::{GridSpec, Maturity, SmileCurve, SmilePoint};
use crate::error::{Error, Result};
use crate::limit_cgf::domain_j;
use crate::model::{ModelCharacteristics, C64};
use crate::par::{self, Exec};
use crate::pricer::black_scholes::bs_implied_vol;
use crate::pricer::riccati::{solve_riccati, RiccatiConfig};

/// Initial state `(X₀, V₀)`; the spot is `S₀ = e^{X₀}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub x0: f64,
    pub v0: f64,
}

impl State {
    pub fn new(x0: f64, v0: f64) -> Self {
        State { x0, v0 }
    }

    /// `X₀ = 0` and `V₀` at the long-run variance level of the model.
    pub fn default_for(model: &ModelCharacteristics) -> Self {
        State {
            x0: 0.0,
            v0: model.default_variance(),
        }
    }

    pub fn spot(&self) -> f64 {
        self.x0.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricingConfig {
    /// Call damping; `None` selects `min(0.75, (u₊ − 1)/2)`.
    pub alpha_d: Option<f64>,
    /// Hard cap on the truncation of the frequency integral.
    pub v_max: f64,
    /// Budget of integrand evaluations per price.
    pub max_evals: usize,
    /// Relative tolerance of each adaptive panel, measured against `∫|f|`.
    pub quad_tol: f64,
    pub ode: RiccatiConfig,
}

impl Default for PricingConfig {
    fn default() -> Self {
        PricingConfig {
            alpha_d: None,
            v_max: 1e4,
            max_evals: 400_000,
            quad_tol: 1e-10,
            ode: RiccatiConfig::default(),
        }
    }
}

/// `E[exp(z X_t)] = exp(φ(t,z,0) + V₀ψ(t,z,0) + X₀z)`.
pub fn char_fn(
    model: &ModelCharacteristics,
    state: State,
    t: f64,
    z: C64,
    cfg: &RiccatiConfig,
) -> Result<C64> {
    let sol = solve_riccati(model, t, z, cfg)?;
    Ok((sol.phi + state.v0 * sol.psi + state.x0 * z).exp())
}

// Gauss–Kronrod 7/15 nodes on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Prices options at one maturity, caching `Ψ(v)` across strikes.
pub struct FourierPricer<'a> {
    model: &'a ModelCharacteristics,
    state: State,
    t: f64,
    alpha: f64,
    cfg: PricingConfig,
    cache: Mutex<HashMap<u64, C64>>,
}

impl<'a> FourierPricer<'a> {
    /// Call pricer with the configured (or default) damping.
    pub fn new(
        model: &'a ModelCharacteristics,
        state: State,
        t: f64,
        cfg: PricingConfig,
    ) -> Result<Self> {
        let (_, u_plus) = domain_j(model)?;
        let alpha = cfg.alpha_d.unwrap_or_else(|| {
            if u_plus.is_finite() {
                0.75f64.min(0.5 * (u_plus - 1.0))
            } else {
                0.75
            }
        });
        if !(alpha > 0.0 && alpha < u_plus - 1.0) {
            return Err(Error::Strip {
                alpha,
                lo: 0.0,
                hi: u_plus - 1.0,
            });
        }
        Self::build(model, state, t, alpha, cfg)
    }

    /// Pricer with explicit damping: `α ∈ (0, u₊ − 1)` prices calls,
    /// `α ∈ (u₋ − 1, −1)` prices puts.
    pub fn with_damping(
        model: &'a ModelCharacteristics,
        state: State,
        t: f64,
        alpha: f64,
        cfg: PricingConfig,
    ) -> Result<Self> {
        let (u_minus, u_plus) = domain_j(model)?;
        let call_ok = alpha > 0.0 && alpha < u_plus - 1.0;
        let put_ok = alpha < -1.0 && alpha > u_minus - 1.0;
        if !(call_ok || put_ok) {
            let (lo, hi) = if alpha < 0.0 {
                (u_minus - 1.0, -1.0)
            } else {
                (0.0, u_plus - 1.0)
            };
            return Err(Error::Strip { alpha, lo, hi });
        }
        Self::build(model, state, t, alpha, cfg)
    }

    fn build(
        model: &'a ModelCharacteristics,
        state: State,
        t: f64,
        alpha: f64,
        cfg: PricingConfig,
    ) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("maturity must be positive, got {t}")));
        }
        Ok(FourierPricer {
            model,
            state,
            t,
            alpha,
            cfg,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn damping(&self) -> f64 {
        self.alpha
    }

    pub fn maturity(&self) -> f64 {
        self.t
    }

    pub fn forward(&self) -> f64 {
        self.state.spot()
    }

    fn psi(&self, v: f64) -> Result<C64> {
        let key = v.to_bits();
        if let Some(z) = self.cache.lock().unwrap().get(&key) {
            return Ok(*z);
        }
        let a = self.alpha;
        let z = C64::new(a + 1.0, v);
        let cf = char_fn(self.model, self.state, self.t, z, &self.cfg.ode)?;
        let den = C64::new(a * a + a - v * v, v * (2.0 * a + 1.0));
        let val = cf / den;
        self.cache.lock().unwrap().insert(key, val);
        Ok(val)
    }

    /// One Gauss–Kronrod panel: (Kronrod estimate, Gauss estimate, ∫|f|).
    fn panel(&self, k: f64, a: f64, b: f64) -> Result<(f64, f64, f64)> {
        let c = 0.5 * (a + b);
        let hw = 0.5 * (b - a);
        let f = |v: f64| -> Result<(f64, f64)> {
            let p = self.psi(v)?;
            Ok(((C64::new(0.0, -v * k).exp() * p).re, p.norm()))
        };
        let (fc, ac) = f(c)?;
        let mut kron = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut l1 = WGK[7] * ac;
        for j in 0..7 {
            let dx = hw * XGK[j];
            let (f1, a1) = f(c - dx)?;
            let (f2, a2) = f(c + dx)?;
            kron += WGK[j] * (f1 + f2);
            l1 += WGK[j] * (a1 + a2);
            if j % 2 == 1 {
                gauss += WG[j / 2] * (f1 + f2);
            }
        }
        Ok((kron * hw, gauss * hw, l1 * hw))
    }

    /// `∫₀^∞ Re[e^{−ivk} Ψ(v)] dv` by adaptive panels, extended until the
    /// tail is negligible against the accumulated mass.
    fn integral(&self, k: f64) -> Result<f64> {
        let tol = self.cfg.quad_tol;
        let mut evals = 0usize;
        let mut total = 0.0;
        let mut mass = 0.0;
        let mut a = 0.0;
        let mut width: f64 = 0.5;
        let mut quiet = 0;
        while a < self.cfg.v_max {
            let b = (a + width).min(self.cfg.v_max);
            let mut stack = vec![(a, b, 0u32)];
            let mut panel_val = 0.0;
            let mut panel_mass = 0.0;
            while let Some((lo, hi, depth)) = stack.pop() {
                let (kr, ga, l1) = self.panel(k, lo, hi)?;
                evals += 15;
                if evals > self.cfg.max_evals {
                    return Err(Error::Quadrature(format!(
                        "evaluation budget {} exhausted at v = {lo} (k = {k}, t = {})",
                        self.cfg.max_evals, self.t
                    )));
                }
                if (kr - ga).abs() <= tol * l1 + 1e-300 || depth >= 40 {
                    panel_val += kr;
                    panel_mass += l1;
                } else {
                    let mid = 0.5 * (lo + hi);
                    stack.push((mid, hi, depth + 1));
                    stack.push((lo, mid, depth + 1));
                }
            }
            total += panel_val;
            mass += panel_mass;
            a = b;
            width = (width * 1.25).min(50.0);
            if panel_mass <= 1e-14 * mass {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        Ok(total)
    }

    /// Raw transform value: the call price for positive damping, the put
    /// price for damping below −1. No arbitrage clamping is applied.
    pub fn transform_price(&self, k: f64) -> Result<f64> {
        Ok((-self.alpha * k).exp() / PI * self.integral(k)?)
    }

    /// Call price at log-strike `k`, clamped to `[(S₀ − e^k)⁺, S₀]`.
    pub fn call(&self, k: f64) -> Result<f64> {
        if self.alpha < 0.0 {
            return Err(Error::Strip {
                alpha: self.alpha,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let f = self.forward();
        let raw = self.transform_price(k)?;
        Ok(raw.clamp((f - k.exp()).max(0.0), f))
    }

    /// Implied volatility of the call struck at `e^k`.
    pub fn implied_vol(&self, k: f64) -> Result<f64> {
        bs_implied_vol(self.call(k)?, self.forward(), k.exp(), self.t)
    }
}

/// Call price `E[(S_t − e^k)⁺]`.
pub fn call_price(
    model: &ModelCharacteristics,
    state: State,
    t: f64,
    k: f64,
    cfg: &PricingConfig,
) -> Result<f64> {
    FourierPricer::new(model, state, t, *cfg)?.call(k)
}

/// Put price `E[(e^k − S_t)⁺]` from the transform with damping below −1.
pub fn put_price(
    model: &ModelCharacteristics,
    state: State,
    t: f64,
    k: f64,
    cfg: &PricingConfig,
) -> Result<f64> {
    let (u_minus, _) = domain_j(model)?;
    let alpha = -1.0
        - if u_minus.is_finite() {
            0.75f64.min(-0.5 * u_minus)
        } else {
            0.75
        };
    let p = FourierPricer::with_damping(model, state, t, alpha, *cfg)?.transform_price(k)?;
    let strike = k.exp();
    Ok(p.clamp((strike - state.spot()).max(0.0), strike))
}

/// `σ_t(x)`: Black–Scholes implied volatility at strike `S₀e^{xt}`.
pub fn sigma_t(
    model: &ModelCharacteristics,
    state: State,
    t: f64,
    x: f64,
    cfg: &PricingConfig,
) -> Result<f64> {
    FourierPricer::new(model, state, t, *cfg)?.implied_vol(state.x0 + x * t)
}

/// `σ_t` over a grid, strikes priced concurrently from one shared pricer.
pub fn term_smile(
    model: &ModelCharacteristics,
    state: State,
    t: f64,
    grid: GridSpec,
    cfg: &PricingConfig,
    exec: Exec,
) -> Result<SmileCurve> {
    let pricer = FourierPricer::new(model, state, t, *cfg)?;
    let xs = grid.points();
    let points = par::map_slice(exec, &xs, |&x| {
        pricer
            .implied_vol(state.x0 + x * t)
            .map(|sigma| SmilePoint {
                x,
                sigma,
                clamped: false,
            })
            .map_err(|e| Error::Domain(format!("sigma_t failed at t = {t}, x = {x}: {e}")))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SmileCurve {
        model: model.id(),
        maturity: Maturity::Finite(t),
        grid,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HestonParams;
    use crate::pricer::black_scholes::{bs_price, norm_cdf};
    use approx::assert_abs_diff_eq;

    fn heston() -> ModelCharacteristics {
        ModelCharacteristics::heston(HestonParams::new(1.15, 0.04, 0.2, -0.4)).unwrap()
    }

    #[test]
    fn char_fn_normalisation() {
        let m = heston();
        let st = State::new(0.3, 0.04);
        let cfg = RiccatiConfig::default();
        let one = char_fn(&m, st, 2.0, C64::new(0.0, 0.0), &cfg).unwrap();
        assert_abs_diff_eq!((one - 1.0).norm(), 0.0, epsilon = 1e-14);
        let fwd = char_fn(&m, st, 2.0, C64::new(1.0, 0.0), &cfg).unwrap();
        assert_abs_diff_eq!((fwd - 0.3f64.exp()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn black_scholes_atm_call() {
        let m = ModelCharacteristics::black_scholes(0.2).unwrap();
        let c = call_price(
            &m,
            State::new(0.0, 0.0),
            1.0,
            0.0,
            &PricingConfig::default(),
        )
        .unwrap();
        let expected = 2.0 * norm_cdf(0.1) - 1.0;
        assert_abs_diff_eq!(c, expected, epsilon = 1e-9);
    }

    #[test]
    fn deep_in_the_money_call_is_the_forward() {
        let m = heston();
        let st = State::default_for(&m);
        let c = call_price(&m, st, 1.0, -40.0, &PricingConfig::default()).unwrap();
        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn black_scholes_smile_is_recovered() {
        let m = ModelCharacteristics::black_scholes(0.2).unwrap();
        let st = State::new(0.0, 0.0);
        for &(t, x) in &[(1.0, 0.0), (5.0, -0.1), (10.0, 0.05), (3.0, 0.2)] {
            let s = sigma_t(&m, st, t, x, &PricingConfig::default()).unwrap();
            assert!((s - 0.2).abs() < 1e-7, "t={t} x={x}: {s}");
        }
        let _ = bs_price;
    }

    #[test]
    fn strip_is_enforced() {
        let m = heston();
        let st = State::default_for(&m);
        let cfg = PricingConfig {
            alpha_d: Some(20.0),
            ..Default::default()
        };
        assert!(matches!(
            call_price(&m, st, 1.0, 0.0, &cfg),
            Err(Error::Strip { .. })
        ));
        assert!(FourierPricer::with_damping(&m, st, 1.0, -0.5, PricingConfig::default()).is_err());
        assert!(FourierPricer::with_damping(&m, st, 1.0, -6.0, PricingConfig::default()).is_err());
    }

    #[test]
    fn put_call_parity() {
        let m = heston();
        let st = State::default_for(&m);
        let cfg = PricingConfig::default();
        for &(t, k) in &[(1.0, -0.2), (1.0, 0.0), (5.0, 0.3), (10.0, -0.5)] {
            let c = call_price(&m, st, t, k, &cfg).unwrap();
            let p = put_price(&m, st, t, k, &cfg).unwrap();
            assert!(
                (c - p - (1.0 - f64::exp(k))).abs() < 1e-9,
                "t={t} k={k}: {}",
                c - p
            );
        }
    }
}
