//! Independent verification oracles.
//!
//! Everything here works by brute enumeration or dense boundary sampling and
//! deliberately shares no code path with the closed-form / root-finding
//! implementations it is used to check.

use crate::ellipse::FocalEllipse;
use crate::point::{self, Point};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Independent orthonormal basis of the plane through the foci and the
/// origin, plus the scalar geometry (center, semi-axes).
struct BoundaryGeometry {
    center: Point,
    a: f64,
    b: f64,
    c: f64,
    e1: Vec<f64>,
    e2: Vec<f64>,
}

fn geometry(e: &FocalEllipse) -> BoundaryGeometry {
    let f1 = e.f1();
    let f2 = e.f2();
    let center = f1.lerp(f2, 0.5);
    let a = e.string_length() / 2.0;
    let c = (f1.dist(f2) / 2.0).min(a);
    let b = ((a - c) * (a + c)).max(0.0).sqrt();
    let dim = f1.dim();
    let e1 = if c > 0.0 {
        let d = f2.sub(f1);
        let n = point::vec_norm(&d);
        d.iter().map(|x| x / n).collect::<Vec<f64>>()
    } else {
        let mut v = vec![0.0; dim];
        v[0] = 1.0;
        v
    };
    // second axis: component of (origin - center) orthogonal to e1, or any
    // completion when the origin sits on the axis
    let q: Vec<f64> = center.coords().iter().map(|x| -x).collect();
    let qe = point::dot(&q, &e1);
    let mut w: Vec<f64> = q.iter().zip(&e1).map(|(qi, ei)| qi - qe * ei).collect();
    if point::vec_norm(&w) < 1e-300 {
        // pick the coordinate direction least aligned with e1
        let k = (0..dim)
            .min_by(|&i, &j| e1[i].abs().partial_cmp(&e1[j].abs()).unwrap())
            .unwrap();
        w = vec![0.0; dim];
        w[k] = 1.0;
        let we = point::dot(&w, &e1);
        for (wi, ei) in w.iter_mut().zip(&e1) {
            *wi -= we * ei;
        }
    }
    let n = point::vec_norm(&w);
    let e2 = w.iter().map(|x| x / n).collect();
    BoundaryGeometry {
        center,
        a,
        b,
        c,
        e1,
        e2,
    }
}

/// Boundary extremes by a uniform sweep of the eccentric angle, optionally
/// polishing every sampled local extremum by golden-section search.
/// Returns `(min, max)` of the distance to the origin over the boundary.
pub fn boundary_sweep_extremes(e: &FocalEllipse, n: usize, refine: bool) -> (f64, f64) {
    assert!(n >= 8);
    if e.dim() == 1 {
        return interval_extremes_1d(e, n);
    }
    let g = geometry(e);
    let dist = |theta: f64| -> f64 {
        g.center
            .add_scaled(&g.e1, g.a * theta.cos())
            .add_scaled(&g.e2, g.b * theta.sin())
            .norm()
    };
    let step = std::f64::consts::TAU / n as f64;
    let samples: Vec<f64> = (0..n).map(|i| dist(i as f64 * step)).collect();
    let mut mn = f64::INFINITY;
    let mut mx = f64::NEG_INFINITY;
    for (i, &d) in samples.iter().enumerate() {
        let prev = samples[(i + n - 1) % n];
        let next = samples[(i + 1) % n];
        let th = i as f64 * step;
        if d <= prev && d <= next {
            let v = if refine {
                golden_min(&dist, th - step, th + step)
            } else {
                d
            };
            mn = mn.min(v);
        }
        if d >= prev && d >= next {
            let v = if refine {
                -golden_min(&|t: f64| -dist(t), th - step, th + step)
            } else {
                d
            };
            mx = mx.max(v);
        }
    }
    (mn, mx)
}

/// Boundary extremes by a uniform sweep of the polar angle around the first
/// focus (the conic polar form `r = l / (1 + e cos phi)`), no refinement.
/// Suitable for moderate eccentricities.
pub fn focal_sweep_extremes(e: &FocalEllipse, n: usize) -> (f64, f64) {
    assert!(n >= 8);
    if e.dim() == 1 {
        return interval_extremes_1d(e, n);
    }
    let g = geometry(e);
    if g.b == 0.0 {
        // the polar form collapses; sample the focal segment directly
        let f1 = e.f1();
        let f2 = e.f2();
        let mut mn = f64::INFINITY;
        let mut mx = f64::NEG_INFINITY;
        for i in 0..=n {
            let d = f1.lerp(f2, i as f64 / n as f64).norm();
            mn = mn.min(d);
            mx = mx.max(d);
        }
        return (mn, mx);
    }
    let l = g.b * g.b / g.a;
    let ecc = g.c / g.a;
    // periapsis direction: from f1 away from f2
    let dir: Vec<f64> = g.e1.iter().map(|x| -x).collect();
    let f1 = e.f1().clone();
    let mut mn = f64::INFINITY;
    let mut mx = f64::NEG_INFINITY;
    let step = std::f64::consts::TAU / n as f64;
    for i in 0..n {
        let phi = i as f64 * step;
        let r = l / (1.0 + ecc * phi.cos());
        let d = f1
            .add_scaled(&dir, r * phi.cos())
            .add_scaled(&g.e2, r * phi.sin())
            .norm();
        mn = mn.min(d);
        mx = mx.max(d);
    }
    (mn, mx)
}

/// Region extremes of a one-dimensional "ellipse" (an interval) by dense
/// enumeration.
pub fn interval_extremes_1d(e: &FocalEllipse, n: usize) -> (f64, f64) {
    let m = (e.f1().coords()[0] + e.f2().coords()[0]) / 2.0;
    let a = e.string_length() / 2.0;
    let mut mn = f64::INFINITY;
    let mut mx = f64::NEG_INFINITY;
    for i in 0..=n {
        let x = m - a + 2.0 * a * i as f64 / n as f64;
        mn = mn.min(x.abs());
        mx = mx.max(x.abs());
    }
    (mn, mx)
}

/// Minimum distance from the origin to the region (not just the boundary):
/// zero when the origin is inside, boundary minimum otherwise.
pub fn closest_possible_oracle(e: &FocalEllipse, n: usize) -> f64 {
    if e.f1().norm() + e.f2().norm() <= e.string_length() {
        return 0.0;
    }
    boundary_sweep_extremes(e, n, true).0
}

/// Maximum distance from the origin to the region.
pub fn farthest_possible_oracle(e: &FocalEllipse, n: usize) -> f64 {
    boundary_sweep_extremes(e, n, true).1
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    f1.min(f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_reproduces_circle_geometry() {
        // circle of radius 1/2 around (0,1): region extremes 0.5 and 1.5
        let e = FocalEllipse::new(Point::from_xy(0.0, 1.0), Point::from_xy(0.0, 1.0), 1.0).unwrap();
        let (mn, mx) = boundary_sweep_extremes(&e, 512, true);
        assert!((mn - 0.5).abs() < 1e-9);
        assert!((mx - 1.5).abs() < 1e-9);
        let (mn, mx) = focal_sweep_extremes(&e, 100_000);
        assert!((mn - 0.5).abs() < 1e-8);
        assert!((mx - 1.5).abs() < 1e-8);
    }

    #[test]
    fn oracle_handles_degenerate_segment() {
        let e =
            FocalEllipse::new(Point::from_xy(-0.5, 1.0), Point::from_xy(0.5, 1.0), 1.0).unwrap();
        let (mn, mx) = boundary_sweep_extremes(&e, 2048, true);
        assert!((mn - 1.0).abs() < 1e-9);
        assert!((mx - 1.25f64.sqrt()).abs() < 1e-9);
        let (mn2, mx2) = focal_sweep_extremes(&e, 4096);
        assert!((mn2 - 1.0).abs() < 1e-9);
        assert!((mx2 - 1.25f64.sqrt()).abs() < 1e-9);
    }
}
