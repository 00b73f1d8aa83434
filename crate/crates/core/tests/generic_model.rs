mod common;

use std::sync::Arc;

use affine_smile::{
    domain_j, solve_w, solve_w_continuation, GenericModel, HalfPlane, JumpTransform, LimitCgf,
    ModelCharacteristics, RateFunction, Region, C64,
};
use common::*;

/// Bates given only through its characteristics.
fn bates_generic() -> ModelCharacteristics {
    let p = heston_params();
    let jumps = JumpTransform::ExpNegative { alpha: ALPHA };
    ModelCharacteristics::generic(GenericModel {
        name: "bates".into(),
        f: Arc::new(move |_u: C64, w: C64| p.lambda * p.theta * w),
        r: Arc::new(move |u: C64, w: C64| {
            0.5 * (u * u - u) + 0.5 * p.zeta * p.zeta * w * w - p.lambda * w
                + u * w * p.rho * p.zeta
                + jumps.eval(u).unwrap_or(C64::new(f64::INFINITY, 0.0))
        }),
        f_domain: Region::whole(),
        r_domain: Region {
            constraints: vec![HalfPlane {
                cu: -1.0,
                cw: 0.0,
                bound: ALPHA,
            }],
        },
    })
}

#[test]
fn continuation_reproduces_the_closed_form_branch() {
    for (name, built_in) in [("heston", heston()), ("bates", bates())] {
        let (lo, hi) = domain_j(&built_in).unwrap();
        for u in interior(lo, hi, 200) {
            let closed = solve_w(&built_in, u).unwrap();
            let cont = solve_w_continuation(&built_in, u).unwrap();
            assert!(
                (closed - cont).abs() < 1e-9 * closed.abs().max(1.0),
                "{name} u={u}: {closed} vs {cont}"
            );
        }
    }
}

#[test]
fn generic_bates_matches_the_built_in() {
    let g = LimitCgf::new(bates_generic()).unwrap();
    let b = limit(&bates());
    assert!((g.u_minus() - b.u_minus()).abs() < 1e-7);
    assert!((g.u_plus() - b.u_plus()).abs() < 1e-7);
    for u in interior(b.u_minus(), b.u_plus(), 100) {
        assert!((g.h(u) - b.h(u)).abs() < 1e-10, "u={u}");
        assert!(
            (g.h_prime(u).unwrap() - b.h_prime(u).unwrap()).abs()
                < 1e-8 * b.h_prime(u).unwrap().abs().max(1.0)
        );
    }
    let (rg, rb) = (RateFunction::new(g).unwrap(), rate(&bates()));
    for x in [-0.1, 0.0, 0.1] {
        assert!((rg.h_star(x).unwrap() - rb.h_star(x).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn generic_model_outside_branch_is_infinite() {
    let g = heston_generic();
    let (_, hi) = heston_delta_roots();
    assert_eq!(solve_w(&g, hi + 0.5).unwrap(), f64::INFINITY);
    assert!(g.id().starts_with("generic:"));
}

#[test]
fn degenerate_generic_model_is_detected() {
    let g = ModelCharacteristics::generic(GenericModel {
        name: "bs".into(),
        f: Arc::new(|u: C64, _w: C64| 0.02 * (u * u - u)),
        r: Arc::new(|_u: C64, _w: C64| C64::new(0.0, 0.0)),
        f_domain: Region::whole(),
        r_domain: Region::whole(),
    });
    assert!(g.is_degenerate());
    assert!(solve_w(&g, 0.5).is_err());
    let l = LimitCgf::new(g).unwrap();
    assert_eq!(l.domain(), (f64::NEG_INFINITY, f64::INFINITY));
    assert!((l.h(2.0) - 0.04).abs() < 1e-15);
}
