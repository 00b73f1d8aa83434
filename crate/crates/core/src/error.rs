use thiserror::Error;

/// Failures raised by the numerical routines and the config loader.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate model: {0}")]
    Degenerate(String),
    #[error("legendre solve did not converge at x = {x} (|h'(u) - x| = {residual:e})")]
    Convergence { x: f64, residual: f64 },
    #[error("riccati solution blew up at t = {t} (|psi| = {modulus:e})")]
    BlowUp { t: f64, modulus: f64 },
    #[error("riccati step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("damping {alpha} outside the admissible strip ({lo}, {hi})")]
    Strip { alpha: f64, lo: f64, hi: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("price {price} outside the no-arbitrage band ({lo}, {hi})")]
    InversionDomain { price: f64, lo: f64, hi: f64 },
    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
