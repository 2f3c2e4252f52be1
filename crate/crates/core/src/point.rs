//! Points in `R^d` and the few vector helpers the rest of the crate needs.

use std::fmt;

/// A point in `R^d` (`d >= 1`), coordinates in normalized distance units.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Panics if `coords` is empty or contains a non-finite value; those are
    /// programming errors, not data errors.
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(!coords.is_empty(), "point must have dimension >= 1");
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "point coordinates must be finite"
        );
        Self { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Self::new(vec![0.0; dim])
    }

    pub fn from_xy(x: f64, y: f64) -> Self {
        Self::new(vec![x, y])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Distance to the origin.
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `self + w * (other - self)`.
    pub fn lerp(&self, other: &Point, w: f64) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + w * (b - a))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Point) -> Vec<f64> {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `self + w * dir`.
    pub fn add_scaled(&self, dir: &[f64], w: f64) -> Point {
        debug_assert_eq!(self.dim(), dir.len());
        Point::new(
            self.coords
                .iter()
                .zip(dir)
                .map(|(a, d)| a + w * d)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(self.coords.iter().map(|a| a * s).collect())
    }

    pub fn translate(&self, offset: &Point) -> Point {
        debug_assert_eq!(self.dim(), offset.dim());
        Point::new(
            self.coords
                .iter()
                .zip(&offset.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub(crate) fn vec_norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// Closest point of the segment `[a, b]` to the origin.
///
/// Returns `(distance, weight, point)` where `point = a + weight * (b - a)`
/// and `weight` is clamped to `[0, 1]`. A zero-length segment yields `a`.
pub fn closest_on_segment(a: &Point, b: &Point) -> (f64, f64, Point) {
    let u = b.sub(a);
    let denom = dot(&u, &u);
    if denom == 0.0 {
        return (a.norm(), 0.0, a.clone());
    }
    let w = (-dot(a.coords(), &u) / denom).clamp(0.0, 1.0);
    let p = a.lerp(b, w);
    (p.norm(), w, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_and_distances() {
        let p = Point::from_xy(3.0, 4.0);
        assert_eq!(p.norm(), 5.0);
        let q = Point::from_xy(0.0, 4.0);
        assert_eq!(p.dist(&q), 3.0);
    }

    #[test]
    fn segment_closest_point() {
        // horizontal segment at height 1
        let a = Point::from_xy(-0.5, 1.0);
        let b = Point::from_xy(0.5, 1.0);
        let (d, w, p) = closest_on_segment(&a, &b);
        assert!((d - 1.0).abs() < 1e-15);
        assert!((w - 0.5).abs() < 1e-15);
        assert_eq!(p, Point::from_xy(0.0, 1.0));

        // foot outside the segment clamps to an endpoint
        let a = Point::from_xy(1.0, 1.0);
        let b = Point::from_xy(2.0, 1.0);
        let (d, w, _) = closest_on_segment(&a, &b);
        assert!((d - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(w, 0.0);

        // degenerate segment
        let (d, _, p) = closest_on_segment(&a, &a);
        assert!((d - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(p, a);
    }

    #[test]
    #[should_panic]
    fn empty_point_rejected() {
        let _ = Point::new(vec![]);
    }
}
