//! Finite-maturity pricing: Riccati characteristic functions, damped Fourier
//! inversion and Black–Scholes implied volatility.

pub mod black_scholes;
pub mod fourier;
pub mod riccati;

pub use black_scholes::{bs_implied_vol, bs_price, norm_cdf};
pub use fourier::{
    call_price, char_fn, put_price, sigma_t, term_smile, FourierPricer, PricingConfig, State,
};
pub use riccati::{heston_closed_form, solve_riccati, RiccatiConfig, RiccatiSolution};
