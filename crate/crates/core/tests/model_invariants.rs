mod common;

use affine_smile::{solve_w, Error, HestonParams, JumpTransform, ModelCharacteristics, C64};
use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn r_is_negative_on_the_unit_interval() {
    for (name, m) in sv_models() {
        for u in interior(0.0, 1.0, 49) {
            assert!(
                m.eval_r_re(u, 0.0) < 0.0,
                "{name}: R({u}, 0) = {}",
                m.eval_r_re(u, 0.0)
            );
        }
    }
}

#[test]
fn characteristics_vanish_at_the_origin_and_one() {
    for (name, m) in all_models() {
        for u in [0.0, 1.0] {
            assert!(m.eval_f_re(u, 0.0).abs() < 1e-15, "{name}: F({u}, 0)");
            assert!(m.eval_r_re(u, 0.0).abs() < 1e-15, "{name}: R({u}, 0)");
        }
    }
}

#[test]
fn characteristics_are_convex_along_random_segments() {
    let mut rng = StdRng::seed_from_u64(7);
    for (name, m) in all_models() {
        let mut tested = 0;
        while tested < 200 {
            let (u, w) = (rng.random_range(-0.5..1.5), rng.random_range(-0.2..0.2));
            let (du, dw) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let s = 1e-3;
            let pts: Vec<(f64, f64)> = (-1..=1)
                .map(|k| (u + k as f64 * s * du, w + k as f64 * s * dw))
                .collect();
            let f: Vec<f64> = pts.iter().map(|&(a, b)| m.eval_f_re(a, b)).collect();
            let r: Vec<f64> = pts.iter().map(|&(a, b)| m.eval_r_re(a, b)).collect();
            if f.iter().chain(&r).any(|v| !v.is_finite()) {
                continue;
            }
            tested += 1;
            for (label, v) in [("F", &f), ("R", &r)] {
                let d2 = (v[0] - 2.0 * v[1] + v[2]) / (s * s);
                assert!(
                    d2 >= -1e-9 - 1e-15 * v[1].abs() / (s * s),
                    "{name}: {label} concave at ({u}, {w}): {d2}"
                );
            }
        }
    }
}

#[test]
fn branch_signs() {
    for (name, m) in sv_models() {
        let l = limit(&m);
        assert_eq!(l.w(0.0), 0.0, "{name}");
        assert!(l.w(1.0).abs() < 1e-15, "{name}");
        for u in interior(0.0, 1.0, 19) {
            assert!(l.w(u) < 0.0 && l.h(u) < 0.0, "{name} at {u}");
        }
        let (lo, hi) = l.domain();
        for u in interior(lo, 0.0, 10)
            .into_iter()
            .chain(interior(1.0, hi.min(20.0), 10))
        {
            assert!(
                l.w(u) > 0.0 && l.h(u) > 0.0,
                "{name} at {u}: w {} h {}",
                l.w(u),
                l.h(u)
            );
            assert!(m.dr_dw(u, l.w(u)) < 0.0, "{name}: unstable branch at {u}");
        }
    }
}

#[test]
fn limit_cgf_is_convex() {
    for (name, m) in all_models() {
        let l = limit(&m);
        let (lo, hi) = l.domain();
        let (lo, hi) = (lo.max(-5.0), hi.min(6.0));
        let e = 1e-3;
        for u in interior(lo + e, hi - e, 100) {
            let d2 = (l.h(u + e) - 2.0 * l.h(u) + l.h(u - e)) / (e * e);
            assert!(d2 >= -1e-9, "{name}: h'' = {d2} at {u}");
        }
    }
}

#[test]
fn validation_reports() {
    for (name, m) in all_models() {
        let r = m.validate();
        assert!(r.passed(), "{name}: {:?}", r.messages);
        assert_eq!(r.degenerate, name == "black_scholes");
    }
    let explosive = ModelCharacteristics::heston(HestonParams::new(0.1, 0.04, 0.2, 0.9)).unwrap();
    let r = explosive.validate();
    assert!(r.chi1 > 0.0 && !r.a5_holds && !r.passed());
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(
        ModelCharacteristics::heston(HestonParams::new(1.0, 0.04, 0.2, 1.0)),
        Err(Error::Config(_))
    ));
    assert!(ModelCharacteristics::heston(HestonParams::new(-1.0, 0.04, 0.2, 0.0)).is_err());
    assert!(ModelCharacteristics::bates(
        heston_params(),
        JumpTransform::ExpNegative { alpha: 0.0 }
    )
    .is_err());
    assert!(ModelCharacteristics::bns(0.5, -1.0, JumpTransform::None).is_err());
    assert!(ModelCharacteristics::bns(
        0.5,
        20.0,
        JumpTransform::ExpSubordinator { a: 1.0, b: 11.0 }
    )
    .is_err());
}

#[test]
fn evaluation_outside_the_domain_is_infinite() {
    let m = bates();
    assert_eq!(m.eval_r_re(-0.7, 0.0), f64::INFINITY);
    assert!(m.eval_r(C64::new(-0.7, 3.0), C64::new(0.0, 0.0)).is_none());
    let b = bns();
    assert_eq!(b.eval_f_re(0.0, 12.0), f64::INFINITY);
    assert_eq!(solve_w(&heston(), 11.0).unwrap(), f64::INFINITY);
}

#[test]
fn degenerate_models_have_no_branch() {
    assert!(matches!(
        solve_w(&black_scholes(), 0.5),
        Err(Error::Degenerate(_))
    ));
    let l = limit(&black_scholes());
    assert_eq!(l.w(0.3), 0.0);
    assert!((l.h(2.0) - 0.5 * 0.04 * 2.0).abs() < 1e-15);
}

#[test]
fn bns_default_variance_is_the_stationary_mean() {
    assert!((bns().default_variance() - 1.4338 / 11.6641).abs() < 1e-12);
    assert_eq!(heston().default_variance(), 0.04);
}
