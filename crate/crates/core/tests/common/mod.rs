#![allow(dead_code)]

use std::sync::Arc;

use affine_smile::{
    GenericModel, HestonParams, JumpTransform, LimitCgf, ModelCharacteristics, RateFunction,
    Region, C64,
};

pub const ALPHA: f64 = 0.6;

pub fn heston_params() -> HestonParams {
    HestonParams::new(1.15, 0.04, 0.2, -0.4)
}

pub fn heston() -> ModelCharacteristics {
    ModelCharacteristics::heston(heston_params()).unwrap()
}

pub fn heston_jumps() -> ModelCharacteristics {
    ModelCharacteristics::heston_jumps(heston_params(), JumpTransform::ExpNegative { alpha: ALPHA })
        .unwrap()
}

pub fn bates() -> ModelCharacteristics {
    ModelCharacteristics::bates(heston_params(), JumpTransform::ExpNegative { alpha: ALPHA })
        .unwrap()
}

pub fn bns() -> ModelCharacteristics {
    ModelCharacteristics::bns(
        0.5783,
        -1.2606,
        JumpTransform::ExpSubordinator {
            a: 1.4338,
            b: 11.6641,
        },
    )
    .unwrap()
}

pub fn black_scholes() -> ModelCharacteristics {
    ModelCharacteristics::black_scholes(0.2).unwrap()
}

/// The four stochastic volatility models with their names.
pub fn sv_models() -> Vec<(&'static str, ModelCharacteristics)> {
    vec![
        ("heston", heston()),
        ("heston_jumps", heston_jumps()),
        ("bates", bates()),
        ("bns", bns()),
    ]
}

pub fn all_models() -> Vec<(&'static str, ModelCharacteristics)> {
    let mut v = sv_models();
    v.push(("black_scholes", black_scholes()));
    v
}

pub fn limit(m: &ModelCharacteristics) -> LimitCgf {
    LimitCgf::new(m.clone()).unwrap()
}

pub fn rate(m: &ModelCharacteristics) -> RateFunction {
    RateFunction::new(limit(m)).unwrap()
}

/// Heston given only through its characteristics, so every derived quantity
/// goes through the generic numerical path.
pub fn heston_generic() -> ModelCharacteristics {
    let HestonParams {
        lambda,
        theta,
        zeta,
        rho,
    } = heston_params();
    ModelCharacteristics::generic(GenericModel {
        name: "heston".into(),
        f: Arc::new(move |_u: C64, w: C64| lambda * theta * w),
        r: Arc::new(move |u: C64, w: C64| {
            0.5 * (u * u - u) + 0.5 * zeta * zeta * w * w - lambda * w + u * w * rho * zeta
        }),
        f_domain: Region::whole(),
        r_domain: Region::whole(),
    })
}

/// Closed-form Heston limit cgf `−(λθ/ζ²)(χ(u) + √Δ(u))`.
pub fn heston_h(u: f64) -> f64 {
    let HestonParams {
        lambda,
        theta,
        zeta,
        rho,
    } = heston_params();
    let chi = rho * zeta * u - lambda;
    let delta = chi * chi - zeta * zeta * (u * u - u);
    -(lambda * theta / (zeta * zeta)) * (chi + delta.sqrt())
}

/// Roots of `Δ(u) = 0` for the Heston reference parameters.
pub fn heston_delta_roots() -> (f64, f64) {
    let HestonParams {
        lambda, zeta, rho, ..
    } = heston_params();
    let a = zeta * zeta * (rho * rho - 1.0);
    let b = zeta * zeta - 2.0 * rho * zeta * lambda;
    let c = lambda * lambda;
    let disc = (b * b - 4.0 * a * c).sqrt();
    let r1 = (-b + disc) / (2.0 * a);
    let r2 = (-b - disc) / (2.0 * a);
    (r1.min(r2), r1.max(r2))
}

/// `sup_u {u x − h(u)}` over `n` evenly spaced points of `[lo, hi]`.
pub fn grid_sup(h: impl Fn(f64) -> f64, x: f64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for i in 0..n {
        let u = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let v = u * x - h(u);
        if v > best.0 {
            best = (v, u);
        }
    }
    best
}

/// A grid of `n` points strictly inside `(lo, hi)`.
pub fn interior(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64)
        .collect()
}

pub const HESTON_JSON: &str =
    r#"{"kind":"heston","params":{"lambda":1.15,"theta":0.04,"zeta":0.2,"rho":-0.4}}"#;
pub const HESTON_JUMPS_JSON: &str = r#"{"kind":"heston_jumps","params":{"lambda":1.15,"theta":0.04,"zeta":0.2,"rho":-0.4},"jumps":{"family":"exp_negative","alpha":0.6}}"#;
pub const BATES_JSON: &str = r#"{"kind":"bates","params":{"lambda":1.15,"theta":0.04,"zeta":0.2,"rho":-0.4},"jumps":{"family":"exp_negative","alpha":0.6}}"#;
pub const BNS_JSON: &str = r#"{"kind":"bns","params":{"lambda":0.5783,"rho":-1.2606},"jumps":{"family":"exp_subordinator","a":1.4338,"b":11.6641}}"#;
pub const BS_JSON: &str = r#"{"kind":"exp_levy","params":{"sigma":0.2}}"#;
