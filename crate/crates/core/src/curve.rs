//! Curve abstraction: raw curves, normalization to the canonical form
//! (domain `[0,1]`, Lipschitz constant 1, query point at the origin),
//! concrete realizations, and sample-counting instrumentation.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instances::FamilySpec;
use crate::point::{closest_on_segment, Point};

/// Slack applied when validating normalized per-piece speeds against 1.
pub const LIPSCHITZ_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("Lipschitz bound must be positive and finite, got {0}")]
    NonPositiveLipschitz(f64),
    #[error("curve domain [{0}, {1}] is empty")]
    EmptyDomain(f64, f64),
    #[error("dimension mismatch: curve has d={curve}, point has d={point}")]
    DimensionMismatch { curve: usize, point: usize },
    #[error("parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("polyline needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polyline has zero total arc length")]
    ZeroLength,
    #[error("breakpoint curve is malformed: {0}")]
    BadBreakpoints(String),
    #[error("circle arc must be two-dimensional")]
    ArcNotPlanar,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("instance generation failed: {0}")]
    Instance(String),
}

/// A curve that is linear in its parameter between breakpoints.
///
/// This covers unit-speed polylines (breakpoints at cumulative arc length)
/// as well as curves with slower pieces, e.g. ones that sit still over a
/// parameter interval. Speed on each piece is `|P[i+1]-P[i]| / (t[i+1]-t[i])`.
#[derive(Clone, Debug)]
pub struct PiecewiseLinear {
    breaks: Vec<f64>,
    points: Vec<Point>,
}

impl PiecewiseLinear {
    pub fn new(breaks: Vec<f64>, points: Vec<Point>) -> Result<Self, CurveError> {
        if breaks.len() != points.len() {
            return Err(CurveError::BadBreakpoints(format!(
                "{} breakpoints vs {} points",
                breaks.len(),
                points.len()
            )));
        }
        if breaks.len() < 2 {
            return Err(CurveError::TooFewVertices(breaks.len()));
        }
        if !breaks.iter().all(|t| t.is_finite()) {
            return Err(CurveError::BadBreakpoints("non-finite breakpoint".into()));
        }
        if !breaks.windows(2).all(|w| w[0] < w[1]) {
            return Err(CurveError::BadBreakpoints(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let dim = points[0].dim();
        if !points.iter().all(|p| p.dim() == dim) {
            return Err(CurveError::BadBreakpoints(
                "points must share one dimension".into(),
            ));
        }
        Ok(Self { breaks, points })
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn eval(&self, t: f64) -> Point {
        let (lo, hi) = self.domain();
        let t = t.clamp(lo, hi);
        let i = match self.breaks.binary_search_by(|b| b.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.breaks.len() - 2),
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.breaks[i], self.breaks[i + 1]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        self.points[i].lerp(&self.points[i + 1], w)
    }

    /// Largest per-piece speed.
    pub fn max_speed(&self) -> f64 {
        self.breaks
            .windows(2)
            .zip(self.points.windows(2))
            .map(|(t, p)| p[0].dist(&p[1]) / (t[1] - t[0]))
            .fold(0.0, f64::max)
    }

    pub fn total_arc_length(&self) -> f64 {
        self.points.windows(2).map(|p| p[0].dist(&p[1])).sum()
    }

    /// Exact minimum distance to the origin over the whole curve, with the
    /// parameter at which it is attained. Closed form per piece.
    pub fn min_distance_to_origin(&self) -> (f64, f64) {
        let mut best = (f64::INFINITY, self.breaks[0]);
        for i in 0..self.points.len() - 1 {
            let (d, w, _) = closest_on_segment(&self.points[i], &self.points[i + 1]);
            if d < best.0 {
                let t = self.breaks[i] + w * (self.breaks[i + 1] - self.breaks[i]);
                best = (d, t);
            }
        }
        best
    }

    /// Exact maximum distance to the origin; attained at a breakpoint.
    pub fn max_distance_to_origin(&self) -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, self.breaks[0]);
        for (t, p) in self.breaks.iter().zip(&self.points) {
            let n = p.norm();
            if n > best.0 {
                best = (n, *t);
            }
        }
        best
    }

    /// Affine reparametrization of the breakpoints onto `[a, b]`, keeping
    /// the points.
    pub fn with_domain(&self, a: f64, b: f64) -> Result<Self, CurveError> {
        if !a.is_finite() || !b.is_finite() || b <= a {
            return Err(CurveError::EmptyDomain(a, b));
        }
        let (lo, hi) = self.domain();
        let scale = (b - a) / (hi - lo);
        let breaks = self.breaks.iter().map(|t| a + (t - lo) * scale).collect();
        Self::new(breaks, self.points.clone())
    }

    /// Affine reparametrization plus spatial rescale used by [`normalize`]:
    /// parameters map through `(t - t0) / width`, points through
    /// `(P - query) / dist_scale`.
    fn normalized(&self, t0: f64, width: f64, query: &Point, dist_scale: f64) -> Self {
        let breaks = self.breaks.iter().map(|t| (t - t0) / width).collect();
        let points = self
            .points
            .iter()
            .map(|p| {
                Point::new(
                    p.coords()
                        .iter()
                        .zip(query.coords())
                        .map(|(c, q)| (c - q) / dist_scale)
                        .collect(),
                )
            })
            .collect();
        // validity is preserved by an affine map
        Self { breaks, points }
    }
}

type EvalFn = Arc<dyn Fn(f64) -> Point + Send + Sync>;

#[derive(Clone)]
enum RawKind {
    PiecewiseLinear(PiecewiseLinear),
    Analytic(EvalFn),
}

/// A black-box curve in user units: an evaluator over a declared domain with
/// a declared Lipschitz bound (distance units per parameter unit).
#[derive(Clone)]
pub struct RawCurve {
    kind: RawKind,
    domain: (f64, f64),
    lipschitz: f64,
    dim: usize,
}

impl RawCurve {
    pub fn from_fn<F>(eval: F, domain: (f64, f64), lipschitz: f64, dim: usize) -> Self
    where
        F: Fn(f64) -> Point + Send + Sync + 'static,
    {
        Self {
            kind: RawKind::Analytic(Arc::new(eval)),
            domain,
            lipschitz,
            dim,
        }
    }

    pub fn from_piecewise_linear(pl: PiecewiseLinear, lipschitz: f64) -> Self {
        let domain = pl.domain();
        let dim = pl.dim();
        Self {
            kind: RawKind::PiecewiseLinear(pl),
            domain,
            lipschitz,
            dim,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: f64) -> Point {
        match &self.kind {
            RawKind::PiecewiseLinear(pl) => pl.eval(t),
            RawKind::Analytic(f) => f(t),
        }
    }

    /// The structural representation, when there is one.
    pub fn as_piecewise_linear(&self) -> Option<&PiecewiseLinear> {
        match &self.kind {
            RawKind::PiecewiseLinear(pl) => Some(pl),
            RawKind::Analytic(_) => None,
        }
    }
}

/// Descriptor for the concrete curve realizations the library ships.
#[derive(Clone, Debug)]
pub enum CurveSpec {
    /// Vertex list traversed at unit speed (arc-length parametrization).
    Polyline(Vec<Point>),
    Constant(Point),
    LineSegment(Point, Point),
    /// Planar arc `center + radius * (cos, sin)` over `[start_angle, end_angle]`.
    CircleArc {
        center: Point,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
    /// Generated adversarial instance; see [`crate::instances`].
    Adversarial {
        family: FamilySpec,
        epsilon: f64,
    },
}

impl CurveSpec {
    pub fn realize(&self) -> Result<RawCurve, CurveError> {
        match self {
            CurveSpec::Polyline(vs) => polyline_curve(vs),
            CurveSpec::Constant(p) => {
                let pl = PiecewiseLinear::new(vec![0.0, 1.0], vec![p.clone(), p.clone()])?;
                Ok(RawCurve::from_piecewise_linear(pl, 1.0))
            }
            CurveSpec::LineSegment(a, b) => polyline_curve(&[a.clone(), b.clone()]),
            CurveSpec::CircleArc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                if center.dim() != 2 {
                    return Err(CurveError::ArcNotPlanar);
                }
                if radius.is_nan() || *radius <= 0.0 || start_angle == end_angle {
                    return Err(CurveError::BadBreakpoints(
                        "arc needs positive radius and a nonzero sweep".into(),
                    ));
                }
                let (c, r) = (center.clone(), *radius);
                let (a0, a1) = (*start_angle, *end_angle);
                let lipschitz = r * (a1 - a0).abs();
                Ok(RawCurve::from_fn(
                    move |t| {
                        let th = a0 + t * (a1 - a0);
                        Point::from_xy(c.coords()[0] + r * th.cos(), c.coords()[1] + r * th.sin())
                    },
                    (0.0, 1.0),
                    lipschitz,
                    2,
                ))
            }
            CurveSpec::Adversarial { family, epsilon } => {
                let bundle = crate::instances::generate(family, *epsilon)
                    .map_err(|e| CurveError::Instance(e.to_string()))?;
                Ok(match bundle.curve {
                    Curve::PiecewiseLinear(pl) => RawCurve::from_piecewise_linear(pl, 1.0),
                    Curve::Analytic { eval, dim } => RawCurve {
                        kind: RawKind::Analytic(eval),
                        domain: (0.0, 1.0),
                        lipschitz: 1.0,
                        dim,
                    },
                })
            }
        }
    }
}

/// Unit-speed arc-length parametrization of a vertex list. Zero-length edges
/// are dropped; the result lives on `[0, total_length]` with Lipschitz
/// constant exactly 1.
pub fn polyline_curve(vertices: &[Point]) -> Result<RawCurve, CurveError> {
    if vertices.len() < 2 {
        return Err(CurveError::TooFewVertices(vertices.len()));
    }
    let dim = vertices[0].dim();
    for v in vertices {
        if v.dim() != dim {
            return Err(CurveError::DimensionMismatch {
                curve: dim,
                point: v.dim(),
            });
        }
    }
    let mut breaks = vec![0.0];
    let mut points = vec![vertices[0].clone()];
    let mut len = 0.0;
    for v in &vertices[1..] {
        let step = points.last().unwrap().dist(v);
        if step > 0.0 {
            len += step;
            breaks.push(len);
            points.push(v.clone());
        }
    }
    if points.len() < 2 {
        return Err(CurveError::ZeroLength);
    }
    let pl = PiecewiseLinear::new(breaks, points)?;
    Ok(RawCurve::from_piecewise_linear(pl, 1.0))
}

/// A curve in canonical form: domain `[0,1]`, Lipschitz constant at most 1,
/// query point at the origin.
#[derive(Clone)]
pub enum Curve {
    PiecewiseLinear(PiecewiseLinear),
    Analytic { eval: EvalFn, dim: usize },
}

impl Curve {
    pub fn constant(p: Point) -> Self {
        Curve::PiecewiseLinear(PiecewiseLinear::new(vec![0.0, 1.0], vec![p.clone(), p]).unwrap())
    }

    pub fn from_fn<F>(eval: F, dim: usize) -> Self
    where
        F: Fn(f64) -> Point + Send + Sync + 'static,
    {
        Curve::Analytic {
            eval: Arc::new(eval),
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Curve::PiecewiseLinear(pl) => pl.dim(),
            Curve::Analytic { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, t: f64) -> Point {
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&t), "parameter {t}");
        match self {
            Curve::PiecewiseLinear(pl) => pl.eval(t),
            Curve::Analytic { eval, .. } => eval(t.clamp(0.0, 1.0)),
        }
    }

    /// The structural representation, when there is one.
    pub fn as_piecewise_linear(&self) -> Option<&PiecewiseLinear> {
        match self {
            Curve::PiecewiseLinear(pl) => Some(pl),
            Curve::Analytic { .. } => None,
        }
    }
}

/// Converts normalized results back to raw units.
#[derive(Clone, Debug)]
pub struct BackMap {
    t_start: f64,
    t_width: f64,
    dist_scale: f64,
    query: Point,
}

impl BackMap {
    pub fn param_to_raw(&self, t: f64) -> f64 {
        self.t_start + t * self.t_width
    }

    pub fn dist_to_raw(&self, r: f64) -> f64 {
        r * self.dist_scale
    }

    pub fn point_to_raw(&self, p: &Point) -> Point {
        p.scale(self.dist_scale).translate(&self.query)
    }

    pub fn dist_scale(&self) -> f64 {
        self.dist_scale
    }
}

/// Normalizes a raw curve against a query point:
/// `C'(t) = (raw(a + t(b-a)) - query) / (L (b-a))` on `[0,1]`.
pub fn normalize(raw: &RawCurve, query: &Point) -> Result<(Curve, BackMap), CurveError> {
    let (a, b) = raw.domain;
    if !raw.lipschitz.is_finite() || raw.lipschitz <= 0.0 {
        return Err(CurveError::NonPositiveLipschitz(raw.lipschitz));
    }
    if !a.is_finite() || !b.is_finite() || b <= a {
        return Err(CurveError::EmptyDomain(a, b));
    }
    if raw.dim != query.dim() {
        return Err(CurveError::DimensionMismatch {
            curve: raw.dim,
            point: query.dim(),
        });
    }
    let width = b - a;
    let dist_scale = raw.lipschitz * width;
    let curve = match &raw.kind {
        RawKind::PiecewiseLinear(pl) => {
            Curve::PiecewiseLinear(pl.normalized(a, width, query, dist_scale))
        }
        RawKind::Analytic(f) => {
            let f = Arc::clone(f);
            let q = query.clone();
            Curve::Analytic {
                eval: Arc::new(move |t| {
                    let p = f(a + t * width);
                    Point::new(
                        p.coords()
                            .iter()
                            .zip(q.coords())
                            .map(|(c, qc)| (c - qc) / dist_scale)
                            .collect(),
                    )
                }),
                dim: raw.dim,
            }
        }
    };
    let back = BackMap {
        t_start: a,
        t_width: width,
        dist_scale,
        query: query.clone(),
    };
    Ok((curve, back))
}

/// A normalized curve wrapped with an evaluation cache and a unique-sample
/// counter. Confined to a single query execution.
pub struct InstrumentedCurve {
    curve: Curve,
    cache: HashMap<u64, Point>,
    unique: usize,
}

impl InstrumentedCurve {
    pub fn new(curve: Curve) -> Self {
        Self {
            curve,
            cache: HashMap::new(),
            unique: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.curve.dim()
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// Evaluates the curve, caching by the exact parameter bit pattern.
    /// Re-evaluating a cached parameter does not increment the counter.
    pub fn evaluate(&mut self, t: f64) -> Result<Point, CurveError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(CurveError::ParameterOutOfRange(t));
        }
        let key = t.to_bits();
        if let Some(p) = self.cache.get(&key) {
            return Ok(p.clone());
        }
        let p = self.curve.eval(t);
        self.cache.insert(key, p.clone());
        self.unique += 1;
        Ok(p)
    }

    pub fn unique_sample_count(&self) -> usize {
        self.unique
    }
}

/// Advisory Lipschitz spot check over random parameter pairs. It can flag a
/// violated declaration but cannot prove the condition holds.
#[derive(Clone, Debug)]
pub struct LipschitzReport {
    pub trials: usize,
    pub max_ratio: f64,
    pub worst_pair: (f64, f64),
    pub exceeds_bound: bool,
}

pub fn verify_lipschitz(curve: &Curve, trials: usize, seed: u64) -> LipschitzReport {
    assert!(trials >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    let mut worst = (0.0, 0.0);
    for _ in 0..trials {
        let t1: f64 = rng.random_range(0.0..=1.0);
        let t2: f64 = rng.random_range(0.0..=1.0);
        if t1 == t2 {
            continue;
        }
        let ratio = curve.eval(t1).dist(&curve.eval(t2)) / (t1 - t2).abs();
        if ratio > max_ratio {
            max_ratio = ratio;
            worst = (t1.min(t2), t1.max(t2));
        }
    }
    LipschitzReport {
        trials,
        max_ratio,
        worst_pair: worst,
        exceeds_bound: max_ratio > 1.0 + LIPSCHITZ_SLACK,
    }
}

/// Parses the polyline file format: one vertex per line, comma-separated
/// coordinates, `#` starts a comment. The dimension is inferred from the
/// first vertex line; all lines must agree.
pub fn parse_polyline<R: BufRead>(reader: R) -> Result<Vec<Point>, CurveError> {
    let mut vertices: Vec<Point> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let coords: Result<Vec<f64>, _> =
            body.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let coords = coords.map_err(|e| CurveError::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(CurveError::Parse {
                line: idx + 1,
                msg: "vertex must be a non-empty list of finite numbers".into(),
            });
        }
        if let Some(first) = vertices.first() {
            if coords.len() != first.dim() {
                return Err(CurveError::Parse {
                    line: idx + 1,
                    msg: format!(
                        "dimension {} disagrees with first vertex (d={})",
                        coords.len(),
                        first.dim()
                    ),
                });
            }
        }
        vertices.push(Point::new(coords));
    }
    if vertices.len() < 2 {
        return Err(CurveError::TooFewVertices(vertices.len()));
    }
    Ok(vertices)
}

pub fn write_polyline<W: Write>(mut w: W, vertices: &[Point]) -> io::Result<()> {
    for v in vertices {
        let line: Vec<String> = v.coords().iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}", line.join(", "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(cs: &[(f64, f64)]) -> Vec<Point> {
        cs.iter().map(|&(x, y)| Point::from_xy(x, y)).collect()
    }

    #[test]
    fn normalize_segment_to_canonical_form() {
        // raw segment (0,0) -> (2,0) on [0,2] at unit speed, query (1,0)
        let raw = polyline_curve(&pts(&[(0.0, 0.0), (2.0, 0.0)])).unwrap();
        assert_eq!(raw.domain(), (0.0, 2.0));
        let (c, back) = normalize(&raw, &Point::from_xy(1.0, 0.0)).unwrap();
        for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let p = c.eval(t);
            assert!((p.coords()[0] - (t - 0.5)).abs() < 1e-15, "t={t} -> {p}");
            assert_eq!(p.coords()[1], 0.0);
        }
        assert_eq!(back.dist_to_raw(1.0), 2.0);
        assert_eq!(back.param_to_raw(0.25), 0.5);
    }

    #[test]
    fn normalize_constant_scales_by_lipschitz() {
        let pl = PiecewiseLinear::new(vec![0.0, 1.0], pts(&[(3.0, 4.0), (3.0, 4.0)])).unwrap();
        let raw = RawCurve::from_piecewise_linear(pl, 5.0);
        let (c, back) = normalize(&raw, &Point::origin(2)).unwrap();
        let p = c.eval(0.3);
        assert!((p.coords()[0] - 0.6).abs() < 1e-15);
        assert!((p.coords()[1] - 0.8).abs() < 1e-15);
        assert!((p.norm() - 1.0).abs() < 1e-15);
        assert_eq!(back.dist_to_raw(1.0), 5.0);
    }

    #[test]
    fn unit_length_polyline_normalizes_to_identity_backmap() {
        let raw = polyline_curve(&pts(&[(0.0, 1.0), (1.0, 1.0)])).unwrap();
        let (_, back) = normalize(&raw, &Point::origin(2)).unwrap();
        assert_eq!(back.param_to_raw(0.37), 0.37);
        assert_eq!(back.dist_to_raw(0.37), 0.37);
    }

    #[test]
    fn normalize_errors() {
        let raw = polyline_curve(&pts(&[(0.0, 1.0), (1.0, 1.0)])).unwrap();
        let bad = RawCurve {
            lipschitz: 0.0,
            ..raw.clone()
        };
        assert!(matches!(
            normalize(&bad, &Point::origin(2)),
            Err(CurveError::NonPositiveLipschitz(_))
        ));
        let bad = RawCurve {
            domain: (1.0, 1.0),
            ..raw.clone()
        };
        assert!(matches!(
            normalize(&bad, &Point::origin(2)),
            Err(CurveError::EmptyDomain(..))
        ));
        assert!(matches!(
            normalize(&raw, &Point::origin(3)),
            Err(CurveError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn polyline_collinear_vertex_keeps_the_same_map() {
        let a = polyline_curve(&pts(&[(0.0, 1.0), (1.0, 1.0)])).unwrap();
        let b = polyline_curve(&pts(&[(0.0, 1.0), (0.5, 1.0), (1.0, 1.0)])).unwrap();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            assert!(a.eval(t).dist(&b.eval(t)) < 1e-15);
        }
    }

    #[test]
    fn polyline_cumulative_lengths_match_arc_length_integration() {
        let raw = polyline_curve(&pts(&[(0.0, 1.0), (0.5, 0.5), (1.0, 1.0)])).unwrap();
        let lam = raw.domain().1;
        assert!((lam - 2.0f64.sqrt()).abs() < 1e-15);
        // half the arc length lands on the middle vertex
        assert!(raw.eval(lam / 2.0).dist(&Point::from_xy(0.5, 0.5)) < 1e-15);
        let (c, _) = normalize(&raw, &Point::origin(2)).unwrap();
        let mid = c.eval(0.5);
        assert!(mid.dist(&Point::from_xy(0.5 / lam, 0.5 / lam)) < 1e-15);

        // independent oracle: integrate speed by fine chord sums and compare
        // against the stored cumulative parametrization
        let n = 20_000;
        let mut arc = 0.0;
        let mut prev = c.eval(0.0);
        for i in 1..=n {
            let t = i as f64 / n as f64;
            let p = c.eval(t);
            arc += prev.dist(&p);
            prev = p;
        }
        assert!((arc - 1.0).abs() < 1e-6, "normalized arc length {arc}");
    }

    #[test]
    fn polyline_rejects_degenerate_input() {
        assert!(matches!(
            polyline_curve(&pts(&[(0.0, 1.0)])),
            Err(CurveError::TooFewVertices(1))
        ));
        assert!(matches!(
            polyline_curve(&pts(&[(0.0, 1.0), (0.0, 1.0)])),
            Err(CurveError::ZeroLength)
        ));
    }

    #[test]
    fn instrumented_cache_contract() {
        let mut c = InstrumentedCurve::new(Curve::constant(Point::from_xy(0.0, 1.0)));
        let p = c.evaluate(0.3).unwrap();
        assert_eq!(p, Point::from_xy(0.0, 1.0));
        assert_eq!(c.unique_sample_count(), 1);
        let q = c.evaluate(0.3).unwrap();
        assert_eq!(p, q);
        assert_eq!(c.unique_sample_count(), 1);
        c.evaluate(0.0).unwrap();
        c.evaluate(1.0).unwrap();
        assert_eq!(c.unique_sample_count(), 3);
        assert!(matches!(
            c.evaluate(1.5),
            Err(CurveError::ParameterOutOfRange(_))
        ));
    }

    #[test]
    fn cache_transparency() {
        let raw = polyline_curve(&pts(&[(-0.5, 1.0), (0.5, 1.0)])).unwrap();
        let (curve, _) = normalize(&raw, &Point::origin(2)).unwrap();
        let mut inst = InstrumentedCurve::new(curve.clone());
        for i in 0..=17 {
            let t = i as f64 / 17.0;
            assert_eq!(inst.evaluate(t).unwrap(), curve.eval(t));
        }
    }

    #[test]
    fn normalized_polyline_is_unit_lipschitz_on_grid() {
        let raw = polyline_curve(&pts(&[(0.0, 1.0), (0.3, 0.4), (0.9, 0.8), (1.4, 0.2)])).unwrap();
        let (c, _) = normalize(&raw, &Point::from_xy(0.1, 0.2)).unwrap();
        let n = 60;
        for i in 0..n {
            for j in (i + 1)..=n {
                let (t1, t2) = (i as f64 / n as f64, j as f64 / n as f64);
                let d = c.eval(t1).dist(&c.eval(t2));
                assert!(d <= (t2 - t1) + 1e-12, "({t1},{t2}): {d}");
            }
        }
    }

    #[test]
    fn lipschitz_checker_flags_mislabeled_curve() {
        // unit-speed segment: ratio 1
        let raw = polyline_curve(&pts(&[(-0.5, 1.0), (0.5, 1.0)])).unwrap();
        let (c, _) = normalize(&raw, &Point::origin(2)).unwrap();
        let rep = verify_lipschitz(&c, 500, 7);
        assert!((rep.max_ratio - 1.0).abs() < 1e-12);
        assert!(!rep.exceeds_bound);

        // constant: ratio 0
        let rep = verify_lipschitz(&Curve::constant(Point::from_xy(0.0, 1.0)), 100, 7);
        assert_eq!(rep.max_ratio, 0.0);

        // speed-2 curve mislabeled as normalized
        let fast = Curve::from_fn(|t| Point::from_xy(2.0 * t, 0.0), 2);
        let rep = verify_lipschitz(&fast, 500, 7);
        assert!(rep.exceeds_bound, "max ratio {}", rep.max_ratio);
    }

    #[test]
    fn polyline_file_roundtrip_and_errors() {
        let text = "# a comment\n0.0, 1.0\n0.5, 0.5 # inline\n1.0, 1.0\n";
        let vs = parse_polyline(text.as_bytes()).unwrap();
        assert_eq!(vs.len(), 3);
        assert_eq!(vs[1], Point::from_xy(0.5, 0.5));

        let mut out = Vec::new();
        write_polyline(&mut out, &vs).unwrap();
        let again = parse_polyline(&out[..]).unwrap();
        assert_eq!(vs, again);

        assert!(matches!(
            parse_polyline("0,1\n0,1,2\n".as_bytes()),
            Err(CurveError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_polyline("0, nope\n".as_bytes()),
            Err(CurveError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_polyline("0,1\n".as_bytes()),
            Err(CurveError::TooFewVertices(1))
        ));
    }

    #[test]
    fn adversarial_spec_realizes_generated_instances() {
        let spec = CurveSpec::Adversarial {
            family: FamilySpec::HiddenSpike { slot: 2 },
            epsilon: 0.05,
        };
        let raw = spec.realize().unwrap();
        assert_eq!(raw.domain(), (0.0, 1.0));
        assert_eq!(raw.lipschitz_bound(), 1.0);
        let (c, _) = normalize(&raw, &Point::origin(2)).unwrap();
        // the dip tip of slot 2 sits at parameter 0.3
        assert!(c.eval(0.3).dist(&Point::from_xy(0.0, 0.025)) < 1e-12);
    }

    #[test]
    fn circle_arc_realizes_with_exact_speed() {
        let spec = CurveSpec::CircleArc {
            center: Point::from_xy(0.0, 0.0),
            radius: 2.0,
            start_angle: 0.0,
            end_angle: std::f64::consts::PI,
        };
        let raw = spec.realize().unwrap();
        assert!((raw.lipschitz_bound() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let (c, _) = normalize(&raw, &Point::from_xy(0.0, -1.0)).unwrap();
        let rep = verify_lipschitz(&c, 2000, 3);
        assert!(
            (rep.max_ratio - 1.0).abs() < 1e-6,
            "ratio {}",
            rep.max_ratio
        );
    }

    #[test]
    fn normalize_backmap_roundtrip() {
        let raw = polyline_curve(&pts(&[(0.3, 2.0), (1.1, 2.6), (2.0, 1.4)])).unwrap();
        let pl = raw
            .as_piecewise_linear()
            .unwrap()
            .with_domain(-1.0, 3.0)
            .unwrap();
        let raw = RawCurve::from_piecewise_linear(pl, 0.7);
        let query = Point::from_xy(0.5, 1.9);
        let (c, back) = normalize(&raw, &query).unwrap();
        for i in 0..=16 {
            let t = i as f64 / 16.0;
            let t_raw = back.param_to_raw(t);
            assert!((-1.0..=3.0).contains(&t_raw));
            // normalized distances scale back to raw distances
            let d_norm = c.eval(t).norm();
            let d_raw = raw.eval(t_raw).dist(&query);
            assert!(
                (back.dist_to_raw(d_norm) - d_raw).abs() <= 1e-12 * (1.0 + d_raw),
                "t={t}"
            );
            // and the witness point maps back onto the raw curve
            let p_raw = back.point_to_raw(&c.eval(t));
            assert!(p_raw.dist(&raw.eval(t_raw)) < 1e-12);
        }
    }

    #[test]
    fn exact_extrema_of_breakpoint_curves() {
        // unit-speed vee: min in the middle of a piece
        let raw = polyline_curve(&pts(&[(-1.0, 1.0), (0.0, 0.5), (1.0, 1.0)])).unwrap();
        let (c, _) = normalize(&raw, &Point::origin(2)).unwrap();
        let pl = c.as_piecewise_linear().unwrap();
        let lam = raw.domain().1;
        let (dmin, tmin) = pl.min_distance_to_origin();
        assert!((dmin - 0.5 / lam).abs() < 1e-15);
        assert!((tmin - 0.5).abs() < 1e-15);
        let (dmax, _) = pl.max_distance_to_origin();
        assert!((dmax - 2.0f64.sqrt() / lam).abs() < 1e-15);
    }
}
