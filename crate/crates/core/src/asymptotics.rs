//! Large-maturity limits: the smile `σ∞(x)`, option price decay rates and the
//! fixed-strike implied volatility limit.

use serde::Serialize;

use crate::error::Result;
use crate::legendre::RateFunction;
use crate::par::{self, Exec};

/// `sgn` with `sgn(0) = +1`.
fn sgn(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Evenly spaced grid of log-moneyness rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        GridSpec { lo, hi, n }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.hi
                    } else {
                        self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Maturity {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmilePoint {
    pub x: f64,
    pub sigma: f64,
    /// The underlying Legendre solve was clamped at the domain edge.
    pub clamped: bool,
}

/// Sampled implied volatility curve `x ↦ σ(x)` at one maturity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmileCurve {
    pub model: String,
    pub maturity: Maturity,
    pub grid: GridSpec,
    pub points: Vec<SmilePoint>,
}

impl SmileCurve {
    pub fn sigmas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.sigma).collect()
    }
}

/// Everything the limit smile needs at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSmilePoint {
    pub x: f64,
    pub sigma_inf: f64,
    pub h_star: f64,
    pub h_tilde_star: f64,
    pub u_x: f64,
    pub clamped: bool,
}

pub fn limit_smile_point(rate: &RateFunction, x: f64) -> Result<LimitSmilePoint> {
    let p = rate.legendre(x)?;
    let h_star = p.value;
    let h_tilde_star = (h_star - x).max(0.0);
    let sigma_inf = std::f64::consts::SQRT_2
        * (sgn(rate.x_tilde_star() - x) * h_tilde_star.sqrt()
            + sgn(x - rate.x_star()) * h_star.sqrt());
    Ok(LimitSmilePoint {
        x,
        sigma_inf,
        h_star,
        h_tilde_star,
        u_x: p.u_x,
        clamped: p.clamped,
    })
}

/// `σ∞(x) = √2 [sgn(x̃* − x) √h̃*(x) + sgn(x − x*) √h*(x)]`.
pub fn sigma_infinity(rate: &RateFunction, x: f64) -> Result<f64> {
    Ok(limit_smile_point(rate, x)?.sigma_inf)
}

/// Decay rate of `(1/t) log E[(S₀e^{xt} − S_t)⁺]`.
pub fn put_rate(rate: &RateFunction, x: f64) -> Result<f64> {
    if x <= rate.x_star() {
        Ok(x - rate.h_star(x)?)
    } else {
        Ok(x)
    }
}

/// Decay rate of `(1/t) log E[(S_t − S₀e^{xt})⁺]`.
pub fn call_rate(rate: &RateFunction, x: f64) -> Result<f64> {
    if x >= rate.x_tilde_star() {
        Ok(-rate.rate_tilde(x)?)
    } else {
        Ok(0.0)
    }
}

/// Decay rate of `(1/t) log (S₀ − E[(S_t − S₀e^{xt})⁺])`.
pub fn covered_call_rate(rate: &RateFunction, x: f64) -> Result<f64> {
    if x > rate.x_tilde_star() {
        Ok(0.0)
    } else if x >= rate.x_star() {
        Ok(x - rate.h_star(x)?)
    } else {
        Ok(x)
    }
}

/// `lim σ̂(K, t) = 2√(2 h*(0))` for any fixed strike.
pub fn fixed_strike_limit(rate: &RateFunction) -> Result<f64> {
    Ok(2.0 * (2.0 * rate.h_star(0.0)?).sqrt())
}

/// Samples `σ∞` on `grid`; points are evaluated independently and assembled
/// by index.
pub fn limit_smile(rate: &RateFunction, grid: GridSpec, exec: Exec) -> Result<SmileCurve> {
    let xs = grid.points();
    let points = par::map_slice(exec, &xs, |&x| {
        limit_smile_point(rate, x).map(|p| SmilePoint {
            x,
            sigma: p.sigma_inf,
            clamped: p.clamped,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SmileCurve {
        model: rate.limit().model().id(),
        maturity: Maturity::Infinite,
        grid,
        points,
    })
}

/// Black–Scholes rate `h*_BS(x; σ²) = (x + σ²/2)² / (2σ²)`.
pub fn bs_rate(x: f64, var: f64) -> f64 {
    (x + 0.5 * var).powi(2) / (2.0 * var)
}

/// Black–Scholes share-measure rate `(x − σ²/2)² / (2σ²)`.
pub fn bs_rate_tilde(x: f64, var: f64) -> f64 {
    (x - 0.5 * var).powi(2) / (2.0 * var)
}
