use libm::erfc;

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn norm_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

fn d_plus(s0: f64, strike: f64, t: f64, sigma: f64) -> f64 {
    let sd = sigma * t.sqrt();
    (s0 / strike).ln() / sd + 0.5 * sd
}

/// Undiscounted Black–Scholes call `S₀N(d₊) − KN(d₋)`.
pub fn bs_price(s0: f64, strike: f64, t: f64, sigma: f64) -> f64 {
    if strike <= 0.0 {
        return s0;
    }
    let sd = sigma * t.sqrt();
    if sd <= 0.0 {
        return (s0 - strike).max(0.0);
    }
    let dp = d_plus(s0, strike, t, sigma);
    s0 * norm_cdf(dp) - strike * norm_cdf(dp - sd)
}

fn bs_vega(s0: f64, strike: f64, t: f64, sigma: f64) -> f64 {
    s0 * norm_pdf(d_plus(s0, strike, t, sigma)) * t.sqrt()
}

/// Inverts [`bs_price`] in `σ`. The price must lie strictly inside
/// `((S₀ − K)⁺, S₀)`.
pub fn bs_implied_vol(price: f64, s0: f64, strike: f64, t: f64) -> Result<f64> {
    let lo_band = (s0 - strike).max(0.0);
    if !(price > lo_band && price < s0 && t > 0.0 && strike > 0.0) {
        return Err(Error::InversionDomain {
            price,
            lo: lo_band,
            hi: s0,
        });
    }
    let f = |s: f64| bs_price(s0, strike, t, s) - price;
    let (mut a, mut b) = (0.0, 1.0);
    while f(b) < 0.0 {
        a = b;
        b *= 2.0;
        if b > 1e4 {
            return Err(Error::InversionDomain {
                price,
                lo: lo_band,
                hi: s0,
            });
        }
    }
    // Start from the Brenner–Subrahmanyam guess, kept inside the bracket.
    let mut s = (price / s0 * (2.0 * std::f64::consts::PI / t).sqrt()).clamp(a + 0.01 * (b - a), b);
    for _ in 0..200 {
        let err = f(s);
        if err == 0.0 {
            break;
        }
        if err > 0.0 {
            b = s
        } else {
            a = s
        }
        let vega = bs_vega(s0, strike, t, s);
        debug_assert!(vega >= 0.0, "negative vega");
        let newton = s - err / vega;
        let next = if vega > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        let done = (next - s).abs() <= 1e-15 * s.max(1e-3) || b - a <= 1e-15 * b.max(1e-3);
        s = next;
        if done {
            break;
        }
    }
    if f(s).abs() <= 1e-12 * s0 {
        Ok(s)
    } else {
        Err(Error::InversionDomain {
            price,
            lo: lo_band,
            hi: s0,
        })
    }
}
