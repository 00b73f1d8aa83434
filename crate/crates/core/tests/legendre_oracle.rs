mod common;

use affine_smile::{critical_points, Exec, GridSpec};
use common::*;

#[test]
fn newton_matches_dense_grid_supremum() {
    for (name, m) in all_models() {
        let r = rate(&m);
        let (lo, hi) = r.limit().domain();
        let (lo, hi) = (lo.max(-50.0), hi.min(50.0));
        for x in [-0.2, -0.05, 0.0, 0.03, 0.15] {
            let (oracle, u_oracle) = grid_sup(|u| r.limit().h(u), x, lo, hi, 100_000);
            let p = r.legendre(x).unwrap();
            assert!(
                (p.value - oracle).abs() < 1e-6,
                "{name} x={x}: {} vs {oracle}",
                p.value
            );
            assert!(
                (p.u_x - u_oracle).abs() < 1e-2,
                "{name} x={x}: u {} vs {u_oracle}",
                p.u_x
            );
        }
    }
}

#[test]
fn biconjugate_recovers_h() {
    // h(u) = sup_x {u x − h*(x)} for u inside the domain.
    for (name, m) in sv_models() {
        let r = rate(&m);
        for u in [-0.3, 0.25, 0.5, 1.5] {
            let x_u = r.limit().h_prime(u).unwrap();
            let xs = GridSpec::new(x_u - 1.0, x_u + 1.0, 20_001).points();
            let best = xs
                .iter()
                .map(|&x| u * x - r.h_star(x).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            let h = r.limit().h(u);
            assert!((best - h).abs() < 1e-6, "{name} u={u}: {best} vs {h}");
        }
    }
}

#[test]
fn rate_function_is_nonnegative_with_minimum_at_critical_point() {
    for (name, m) in all_models() {
        let r = rate(&m);
        let (xs, xts) = critical_points(r.limit()).unwrap();
        assert!(xs < 0.0 && 0.0 < xts, "{name}");
        let grid = GridSpec::new(-0.5, 0.5, 401).points();
        let mut prev = f64::NAN;
        for &x in &grid {
            let v = r.h_star(x).unwrap();
            assert!(v >= 0.0, "{name}");
            if prev.is_nan() {
                prev = v;
                continue;
            }
            if x <= xs {
                assert!(v <= prev, "{name}: h* not decreasing left of x* at {x}");
            } else if x > xs + 1e-3 {
                assert!(v >= prev, "{name}: h* not increasing right of x* at {x}");
            }
            prev = v;
        }
    }
}

#[test]
fn growth_is_bounded_by_the_domain() {
    // h*(x) ≤ u₊x − min h for x > 0 and h*(x) ≤ u₋x − min h for x < 0.
    for (name, m) in sv_models() {
        let r = rate(&m);
        let (lo, hi) = r.limit().domain();
        let h_min = interior(0.0, 1.0, 999)
            .into_iter()
            .map(|u| r.limit().h(u))
            .fold(0.0, f64::min);
        for x in [1.0, 5.0, 20.0] {
            let v = r.h_star(x).unwrap();
            assert!(v <= hi * x - h_min + 1e-9, "{name}: h*({x}) = {v}");
        }
        for x in [-1.0, -5.0, -20.0] {
            let v = r.h_star(x).unwrap();
            assert!(v <= lo * x - h_min + 1e-9, "{name}: h*({x}) = {v}");
        }
    }
}

#[test]
fn evaluation_order_does_not_matter() {
    let r = rate(&bates());
    let grid = GridSpec::new(-0.4, 0.4, 257);
    let forward: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| r.h_star(x).unwrap())
        .collect();
    let backward: Vec<f64> = grid
        .points()
        .iter()
        .rev()
        .map(|&x| r.h_star(x).unwrap())
        .rev()
        .collect();
    assert_eq!(forward, backward);
    let par = affine_smile::limit_smile(&r, grid, Exec::Parallel).unwrap();
    let seq = affine_smile::limit_smile(&r, grid, Exec::Sequential).unwrap();
    assert_eq!(par, seq);
}
