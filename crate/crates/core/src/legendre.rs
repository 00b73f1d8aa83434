//! Fenchel–Legendre transform `h*(x) = sup_u {u x − h(u)}` of the limiting cgf.
//!
//! For a steep, strictly convex `h` the supremum is attained at the unique
//! root `u_x` of `h'(u) = x`, and `h*(x) = x u_x − h(u_x)`. Roots are found by
//! Newton iteration safeguarded by bisection inside the open domain of `h`.
//! A fixed table of `(h'(u_i), u_i)` built at construction supplies tight
//! initial brackets, so a given `x` always takes the same path whatever order
//! or thread it is evaluated in.

use crate::error::{Error, Result};
use crate::limit_cgf::{LimitCgf, U_MAX};

const MAX_ITER: usize = 80;
const CORE_NODES: usize = 129;

/// Solution of `h'(u) = x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendrePoint {
    pub x: f64,
    pub u_x: f64,
    /// `h*(x)`
    pub value: f64,
    /// The root lies beyond the numerically usable bracket; `u_x` was
    /// clamped to its edge.
    pub clamped: bool,
}

/// `(x*, x̃*) = (h'(0), h'(1))`, the minimisers of `h*` and `h̃*`.
pub fn critical_points(limit: &LimitCgf) -> Result<(f64, f64)> {
    Ok((limit.h_prime(0.0)?, limit.h_prime(1.0)?))
}

/// Rate functions `h*` and `h̃* = h* − x` of a limiting cgf.
#[derive(Debug, Clone)]
pub struct RateFunction {
    limit: LimitCgf,
    x_star: f64,
    x_tilde_star: f64,
    lo: f64,
    hi: f64,
    /// Strictly increasing in both coordinates: (h'(u_i), u_i).
    table: Vec<(f64, f64)>,
}

impl RateFunction {
    pub fn new(limit: LimitCgf) -> Result<Self> {
        let (x_star, x_tilde_star) = critical_points(&limit)?;
        let (u_minus, u_plus) = limit.domain();
        let eps = if u_minus.is_finite() && u_plus.is_finite() {
            1e-10 * (u_plus - u_minus)
        } else {
            1e-10
        };
        let lo = if u_minus.is_finite() {
            u_minus + eps * u_minus.abs().max(1.0)
        } else {
            -U_MAX
        };
        let hi = if u_plus.is_finite() {
            u_plus - eps * u_plus.abs().max(1.0)
        } else {
            U_MAX
        };

        let mut nodes = Vec::new();
        let (core_lo, core_hi) = (lo.max(-4.0), hi.min(5.0));
        for i in 0..CORE_NODES {
            nodes.push(core_lo + (core_hi - core_lo) * i as f64 / (CORE_NODES - 1) as f64);
        }
        // Geometric refinement towards finite endpoints, doubling towards
        // infinite ones.
        for (edge, core, end) in [(lo, core_lo, u_minus), (hi, core_hi, u_plus)] {
            if edge == core {
                continue;
            }
            if end.is_finite() {
                let mut gap = core - edge;
                while gap.abs() > 1e-12 * edge.abs().max(1.0) {
                    gap *= 0.5;
                    nodes.push(edge + gap);
                }
            } else {
                let dir = (edge - core).signum();
                let mut span = 1.0;
                while core + dir * span < U_MAX && core + dir * span > -U_MAX {
                    nodes.push(core + dir * span);
                    span *= 2.0;
                }
            }
            nodes.push(edge);
        }
        // Tabulating u = 0 and u = 1 makes h*(x*) and h̃*(x̃*) exact.
        nodes.extend([0.0, 1.0]);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let mut table: Vec<(f64, f64)> = Vec::with_capacity(nodes.len());
        for u in nodes {
            if let Ok(x) = limit.h_prime(u) {
                if table.last().is_none_or(|&(px, pu)| x > px && u > pu) {
                    table.push((x, u));
                }
            }
        }
        if table.len() < 2 {
            return Err(Error::Domain(
                "h' could not be tabulated on its domain".into(),
            ));
        }
        Ok(RateFunction {
            limit,
            x_star,
            x_tilde_star,
            lo: table[0].1,
            hi: table[table.len() - 1].1,
            table,
        })
    }

    pub fn limit(&self) -> &LimitCgf {
        &self.limit
    }

    pub fn x_star(&self) -> f64 {
        self.x_star
    }

    pub fn x_tilde_star(&self) -> f64 {
        self.x_tilde_star
    }

    /// The tabulated `(h'(u), u)` pairs used to seed root searches.
    pub fn table(&self) -> &[(f64, f64)] {
        &self.table
    }

    fn hp(&self, u: f64) -> f64 {
        self.limit.h_prime(u).unwrap_or(f64::NAN)
    }

    fn point(&self, x: f64, u: f64, clamped: bool) -> LegendrePoint {
        let value = (x * u - self.limit.h(u)).max(0.0);
        LegendrePoint {
            x,
            u_x: u,
            value,
            clamped,
        }
    }

    /// Solves `h'(u_x) = x` and returns `h*(x) = x u_x − h(u_x)`.
    pub fn legendre(&self, x: f64) -> Result<LegendrePoint> {
        if !x.is_finite() {
            return Err(Error::Domain(format!(
                "legendre transform at non-finite x = {x}"
            )));
        }
        let n = self.table.len();
        let (first, last) = (self.table[0], self.table[n - 1]);
        if x <= first.0 {
            return Ok(self.point(x, self.lo, x < first.0));
        }
        if x >= last.0 {
            return Ok(self.point(x, self.hi, x > last.0));
        }
        let i = self.table.partition_point(|&(tx, _)| tx <= x) - 1;
        let (mut a, mut b) = (self.table[i].1, self.table[i + 1].1);
        let (xa, xb) = (self.table[i].0, self.table[i + 1].0);
        if x == xa {
            return Ok(self.point(x, a, false));
        }
        let tol = 1e-10 * x.abs().max(1.0);
        let mut u = a + (b - a) * (x - xa) / (xb - xa);
        let mut g = self.hp(u) - x;
        for _ in 0..MAX_ITER {
            if g.abs() < tol {
                return Ok(self.point(x, u, false));
            }
            if g > 0.0 {
                b = u
            } else {
                a = u
            }
            if b - a <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
                // Machine resolution of u reached before the residual target.
                break;
            }
            let step = 1e-7 * (b - a).min(u.abs().max(1.0));
            let curv = (self.hp((u + step).min(b)) - self.hp((u - step).max(a)))
                / ((u + step).min(b) - (u - step).max(a));
            let newton = u - g / curv;
            u = if curv > 0.0 && newton > a && newton < b && (newton - u).abs() < 0.75 * (b - a) {
                newton
            } else {
                0.5 * (a + b)
            };
            g = self.hp(u) - x;
        }
        if g.abs() < tol {
            return Ok(self.point(x, u, false));
        }
        Err(Error::Convergence {
            x,
            residual: g.abs(),
        })
    }

    /// `h*(x)`.
    pub fn h_star(&self, x: f64) -> Result<f64> {
        Ok(self.legendre(x)?.value)
    }

    /// `h̃*(x) = h*(x) − x`, the rate function under the share measure.
    pub fn rate_tilde(&self, x: f64) -> Result<f64> {
        Ok(self.h_star(x)? - x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{HestonParams, ModelCharacteristics};
    use approx::assert_abs_diff_eq;

    fn heston_rate() -> RateFunction {
        let m = ModelCharacteristics::heston(HestonParams::new(1.15, 0.04, 0.2, -0.4)).unwrap();
        RateFunction::new(LimitCgf::new(m).unwrap()).unwrap()
    }

    fn bs_rate(sigma: f64) -> RateFunction {
        let m = ModelCharacteristics::black_scholes(sigma).unwrap();
        RateFunction::new(LimitCgf::new(m).unwrap()).unwrap()
    }

    #[test]
    fn minimum_sits_at_the_critical_point() {
        let r = heston_rate();
        let p = r.legendre(-0.02).unwrap();
        assert_abs_diff_eq!(p.value, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.u_x, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(
            r.rate_tilde(r.x_tilde_star()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn black_scholes_closed_form() {
        let r = bs_rate(0.2);
        assert_abs_diff_eq!(r.h_star(0.0).unwrap(), 0.005, epsilon = 1e-14);
        assert_abs_diff_eq!(r.rate_tilde(0.0).unwrap(), 0.005, epsilon = 1e-14);
        for x in [-0.3, -0.05, 0.01, 0.2, 1.5] {
            let exact = (x + 0.02f64).powi(2) / 0.08;
            assert_abs_diff_eq!(
                r.h_star(x).unwrap(),
                exact,
                epsilon = 1e-12 * exact.max(1.0)
            );
        }
        let (xs, xts) = (r.x_star(), r.x_tilde_star());
        assert_abs_diff_eq!(xs, -0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(xts, 0.02, epsilon = 1e-15);
    }

    #[test]
    fn rate_tilde_at_zero_is_h_star_at_zero() {
        let r = heston_rate();
        assert_eq!(r.rate_tilde(0.0).unwrap(), r.h_star(0.0).unwrap());
    }

    #[test]
    fn heston_critical_points() {
        let r = heston_rate();
        assert_abs_diff_eq!(r.x_star(), -0.02, epsilon = 1e-14);
        assert_abs_diff_eq!(r.x_tilde_star(), 0.046 / 2.46, epsilon = 1e-14);
    }

    #[test]
    fn table_is_monotone() {
        let r = heston_rate();
        assert!(r
            .table()
            .windows(2)
            .all(|p| p[1].0 > p[0].0 && p[1].1 > p[0].1));
    }

    #[test]
    fn extreme_slopes_converge_or_clamp() {
        let r = heston_rate();
        for x in [-100.0, -10.0, 10.0, 100.0, 1e4] {
            let p = r.legendre(x).unwrap();
            assert!(p.value.is_finite() && p.value > 0.0);
        }
        assert!(r.legendre(1e12).unwrap().clamped);
        assert!(r.legendre(f64::NAN).is_err());
    }
}
