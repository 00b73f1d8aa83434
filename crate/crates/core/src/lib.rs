//! Large-maturity implied volatility smiles of affine stochastic volatility
//! models with jumps.
//!
//! The pipeline runs from a [`ModelCharacteristics`] (the functions `F` and
//! `R` of an affine model) to its limiting cumulant generating function
//! [`LimitCgf`], the rate function [`RateFunction`] obtained by Legendre
//! transform, and finally the limit smile `σ∞`. The [`pricer`] module prices
//! finite-maturity options from the Riccati characteristic function so the
//! convergence `σ_t → σ∞` can be measured.
//!
//! ```
//! use affine_smile::{HestonParams, LimitCgf, ModelCharacteristics, RateFunction};
//!
//! let model = ModelCharacteristics::heston(HestonParams::new(1.15, 0.04, 0.2, -0.4)).unwrap();
//! let rate = RateFunction::new(LimitCgf::new(model).unwrap()).unwrap();
//! let sigma = affine_smile::sigma_infinity(&rate, 0.0).unwrap();
//! assert!(sigma > 0.19 && sigma < 0.2);
//! ```

pub mod asymptotics;
pub mod cli;
pub mod config;
pub mod error;
pub mod legendre;
pub mod limit_cgf;
pub mod model;
pub mod par;
pub mod pricer;

pub use asymptotics::{
    call_rate, covered_call_rate, fixed_strike_limit, limit_smile, limit_smile_point, put_rate,
    sigma_infinity, GridSpec, LimitSmilePoint, Maturity, SmileCurve, SmilePoint,
};
pub use config::ModelConfig;
pub use error::{Error, Result};
pub use legendre::{critical_points, LegendrePoint, RateFunction};
pub use limit_cgf::{domain_j, solve_w, solve_w_continuation, LimitCgf};
pub use model::{
    AssumptionReport, CustomJump, GenericModel, HalfPlane, HestonParams, JumpTransform,
    ModelCharacteristics, ModelKind, ModelParams, Region, C64,
};
pub use par::Exec;
