//! The adaptive nearest/farthest-point solver and the non-adaptive
//! uniform-grid baseline.
//!
//! The solver keeps a priority queue of unexplored parameter intervals keyed
//! by the extremal distance of their focal ellipses. It repeatedly takes the
//! most promising interval; if the incumbent sample already certifies the
//! answer against that bound it stops, otherwise it samples the exact
//! midpoint and requeues the two halves with fresh bounds. On termination
//! the sampled set is a proof set for the query.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::curve::{CurveError, InstrumentedCurve};
use crate::ellipse::{EllipseError, FocalEllipse};
use crate::point::Point;
use crate::trace::{SolveTrace, TerminateReason, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryKind {
    Nearest,
    Farthest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorMode {
    Absolute,
    Relative,
}

/// What to solve: nearest or farthest, with an absolute or relative
/// tolerance. Absolute mode requires `0 < eps < 1/2` (at `eps >= 1/2` a
/// single sample at `1/2` answers both problems, so such queries are
/// rejected); relative mode requires `eps > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub kind: QueryKind,
    pub error: ErrorMode,
    pub epsilon: f64,
}

impl Query {
    pub fn nearest_abs(epsilon: f64) -> Self {
        Query {
            kind: QueryKind::Nearest,
            error: ErrorMode::Absolute,
            epsilon,
        }
    }

    pub fn farthest_abs(epsilon: f64) -> Self {
        Query {
            kind: QueryKind::Farthest,
            error: ErrorMode::Absolute,
            epsilon,
        }
    }

    pub fn nearest_rel(epsilon: f64) -> Self {
        Query {
            kind: QueryKind::Nearest,
            error: ErrorMode::Relative,
            epsilon,
        }
    }

    pub fn farthest_rel(epsilon: f64) -> Self {
        Query {
            kind: QueryKind::Farthest,
            error: ErrorMode::Relative,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let ok = match self.error {
            ErrorMode::Absolute => self.epsilon > 0.0 && self.epsilon < 0.5,
            ErrorMode::Relative => self.epsilon > 0.0 && self.epsilon.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(SolveError::InvalidQuery {
                epsilon: self.epsilon,
                mode: self.error,
            })
        }
    }

    /// Default evaluation budget. Absolute-mode termination is guaranteed
    /// well inside it, so tripping the guard signals a violated Lipschitz
    /// declaration, or a relative query on a curve whose extremum is zero.
    pub fn default_budget(&self) -> usize {
        10 * (1.0 / self.epsilon).ceil() as usize + 64
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid query: epsilon {epsilon} not allowed in {mode:?} mode")]
    InvalidQuery { epsilon: f64, mode: ErrorMode },
    #[error("uniform baseline requires absolute mode")]
    BaselineNeedsAbsolute,
    #[error(
        "sample budget of {budget} exceeded; best so far {:.6} at {:.6}",
        partial.distance,
        partial.x_star
    )]
    BudgetExceeded {
        budget: usize,
        partial: Box<PartialSolve>,
    },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Ellipse(#[from] EllipseError),
}

/// Best information at the moment a budget guard tripped.
#[derive(Clone, Debug)]
pub struct PartialSolve {
    pub x_star: f64,
    pub point: Point,
    pub distance: f64,
    pub best_bound: f64,
    pub samples_used: usize,
    pub trace: SolveTrace,
}

/// A completed query: the witness parameter, its point and distance, the
/// certified enclosure `[certified_lower, certified_upper]`, the number of
/// distinct samples spent, and the full trace.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub x_star: f64,
    pub point: Point,
    pub distance: f64,
    pub certified_lower: f64,
    pub certified_upper: f64,
    pub samples_used: usize,
    pub trace: SolveTrace,
}

struct HeapItem {
    score: f64,
    seq: u64,
    key: f64,
    x1: f64,
    x2: f64,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap: higher score first; FIFO among equal scores
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn interval_bound(kind: QueryKind, p1: &Point, p2: &Point, width: f64) -> Result<f64, SolveError> {
    let e = FocalEllipse::new(p1.clone(), p2.clone(), width)?;
    Ok(match kind {
        QueryKind::Nearest => e.closest_possible(),
        QueryKind::Farthest => e.farthest_possible(),
    })
}

/// Runs the adaptive solver with the default budget.
pub fn solve(curve: InstrumentedCurve, query: &Query) -> Result<SolveResult, SolveError> {
    let budget = query.default_budget();
    solve_with_budget(curve, query, budget)
}

pub fn solve_with_budget(
    mut curve: InstrumentedCurve,
    query: &Query,
    budget: usize,
) -> Result<SolveResult, SolveError> {
    query.validate()?;
    let kind = query.kind;
    let eps = query.epsilon;
    let mut events: Vec<TraceEvent> = Vec::new();
    let mut heap: BinaryHeap<HeapItem> = BinaryHeap::new();
    let mut seq: u64 = 0;

    let p0 = curve.evaluate(0.0)?;
    events.push(TraceEvent::Sample {
        t: 0.0,
        point: p0.clone(),
    });
    let p1 = curve.evaluate(1.0)?;
    events.push(TraceEvent::Sample {
        t: 1.0,
        point: p1.clone(),
    });

    let key01 = interval_bound(kind, &p0, &p1, 1.0)?;
    heap.push(HeapItem {
        score: score(kind, key01),
        seq,
        key: key01,
        x1: 0.0,
        x2: 1.0,
    });
    seq += 1;
    events.push(TraceEvent::Insert {
        key: key01,
        x1: 0.0,
        x2: 1.0,
    });

    // incumbent, with the tie rule of the listing: a strict comparison, so
    // exact ties go to parameter 1
    let (n0, n1) = (p0.norm(), p1.norm());
    let better = match kind {
        QueryKind::Nearest => n0 < n1,
        QueryKind::Farthest => n0 > n1,
    };
    let (mut best_x, mut best_d) = if better { (0.0, n0) } else { (1.0, n1) };

    loop {
        let item = heap.pop().expect("queue cannot empty before termination");
        events.push(TraceEvent::Extract {
            key: item.key,
            x1: item.x1,
            x2: item.x2,
        });

        let done = match (kind, query.error) {
            (QueryKind::Nearest, ErrorMode::Absolute) => best_d - eps <= item.key,
            (QueryKind::Farthest, ErrorMode::Absolute) => item.key <= best_d + eps,
            (QueryKind::Nearest, ErrorMode::Relative) => {
                item.key > 0.0 && best_d / item.key <= 1.0 + eps
            }
            (QueryKind::Farthest, ErrorMode::Relative) => {
                best_d > 0.0 && item.key / best_d <= 1.0 + eps
            }
        };
        if done {
            let reason = match query.error {
                ErrorMode::Absolute => TerminateReason::AbsoluteGap,
                ErrorMode::Relative => TerminateReason::RelativeRatio,
            };
            events.push(TraceEvent::Terminate { reason });
            let (lo, hi) = match kind {
                QueryKind::Nearest => (item.key, best_d),
                QueryKind::Farthest => (best_d, item.key),
            };
            let point = curve.evaluate(best_x)?;
            return Ok(SolveResult {
                x_star: best_x,
                point,
                distance: best_d,
                certified_lower: lo,
                certified_upper: hi,
                samples_used: curve.unique_sample_count(),
                trace: SolveTrace {
                    query: query.clone(),
                    events,
                },
            });
        }

        if curve.unique_sample_count() >= budget {
            let point = curve.evaluate(best_x)?;
            return Err(SolveError::BudgetExceeded {
                budget,
                partial: Box::new(PartialSolve {
                    x_star: best_x,
                    point,
                    distance: best_d,
                    best_bound: item.key,
                    samples_used: curve.unique_sample_count(),
                    trace: SolveTrace {
                        query: query.clone(),
                        events,
                    },
                }),
            });
        }

        let x = (item.x1 + item.x2) / 2.0;
        let p = curve.evaluate(x)?;
        events.push(TraceEvent::Sample {
            t: x,
            point: p.clone(),
        });
        let n = p.norm();
        let improves = match kind {
            QueryKind::Nearest => n < best_d,
            QueryKind::Farthest => n > best_d,
        };
        if improves {
            best_x = x;
            best_d = n;
        }

        let pl = curve.evaluate(item.x1)?;
        let pr = curve.evaluate(item.x2)?;
        let key_left = interval_bound(kind, &pl, &p, x - item.x1)?;
        heap.push(HeapItem {
            score: score(kind, key_left),
            seq,
            key: key_left,
            x1: item.x1,
            x2: x,
        });
        seq += 1;
        events.push(TraceEvent::Insert {
            key: key_left,
            x1: item.x1,
            x2: x,
        });
        let key_right = interval_bound(kind, &p, &pr, item.x2 - x)?;
        heap.push(HeapItem {
            score: score(kind, key_right),
            seq,
            key: key_right,
            x1: x,
            x2: item.x2,
        });
        seq += 1;
        events.push(TraceEvent::Insert {
            key: key_right,
            x1: x,
            x2: item.x2,
        });
    }
}

fn score(kind: QueryKind, key: f64) -> f64 {
    match kind {
        QueryKind::Nearest => -key,
        QueryKind::Farthest => key,
    }
}

/// Non-adaptive baseline: samples the arithmetic grid with step `2 eps`
/// (plus the final point 1) and certifies from the per-gap ellipses.
/// Uses exactly `ceil(1/(2 eps)) + 1` samples.
pub fn uniform_baseline(
    mut curve: InstrumentedCurve,
    query: &Query,
) -> Result<SolveResult, SolveError> {
    query.validate()?;
    if query.error != ErrorMode::Absolute {
        return Err(SolveError::BaselineNeedsAbsolute);
    }
    let kind = query.kind;
    let eps = query.epsilon;
    let step = 2.0 * eps;
    let m = (1.0 / step).ceil() as usize;
    let mut params: Vec<f64> = (0..m)
        .map(|i| i as f64 * step)
        .take_while(|t| *t < 1.0)
        .collect();
    params.push(1.0);

    let mut events = Vec::new();
    let mut points = Vec::with_capacity(params.len());
    for &t in &params {
        let p = curve.evaluate(t)?;
        events.push(TraceEvent::Sample {
            t,
            point: p.clone(),
        });
        points.push(p);
    }

    let (mut best_x, mut best_d) = (params[0], points[0].norm());
    for (t, p) in params.iter().zip(&points).skip(1) {
        let n = p.norm();
        let improves = match kind {
            QueryKind::Nearest => n < best_d,
            QueryKind::Farthest => n > best_d,
        };
        if improves {
            best_x = *t;
            best_d = n;
        }
    }

    let mut bound = match kind {
        QueryKind::Nearest => f64::INFINITY,
        QueryKind::Farthest => f64::NEG_INFINITY,
    };
    for i in 0..params.len() - 1 {
        let b = interval_bound(kind, &points[i], &points[i + 1], params[i + 1] - params[i])?;
        bound = match kind {
            QueryKind::Nearest => bound.min(b),
            QueryKind::Farthest => bound.max(b),
        };
    }
    events.push(TraceEvent::Terminate {
        reason: TerminateReason::GridExhausted,
    });

    let (lo, hi) = match kind {
        QueryKind::Nearest => (bound, best_d),
        QueryKind::Farthest => (best_d, bound),
    };
    let point = curve.evaluate(best_x)?;
    Ok(SolveResult {
        x_star: best_x,
        point,
        distance: best_d,
        certified_lower: lo,
        certified_upper: hi,
        samples_used: curve.unique_sample_count(),
        trace: SolveTrace {
            query: query.clone(),
            events,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{normalize, polyline_curve, Curve};
    use crate::trace::replay;

    fn segment_curve() -> Curve {
        // C(x) = (x - 0.5, 0.3)
        let raw = polyline_curve(&[Point::from_xy(-0.5, 0.3), Point::from_xy(0.5, 0.3)]).unwrap();
        normalize(&raw, &Point::origin(2)).unwrap().0
    }

    fn sampled_params(trace: &SolveTrace) -> Vec<f64> {
        trace
            .events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Sample { t, .. } => Some(*t),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn golden_run_constant_curve() {
        // hand-simulated reference: 5 samples in the order 0, 1, 0.5, 0.25, 0.75
        let curve = Curve::constant(Point::from_xy(0.0, 1.0));
        let r = solve(InstrumentedCurve::new(curve), &Query::nearest_abs(0.2)).unwrap();
        assert_eq!(r.samples_used, 5);
        assert_eq!(sampled_params(&r.trace), vec![0.0, 1.0, 0.5, 0.25, 0.75]);
        assert_eq!(r.x_star, 1.0);
        assert_eq!(r.distance, 1.0);
        assert!(r.certified_upper - r.certified_lower <= 0.2);
        assert_eq!(r.distance, r.certified_upper);
        replay(&r.trace).unwrap();
    }

    #[test]
    fn golden_run_segment() {
        let r = solve(
            InstrumentedCurve::new(segment_curve()),
            &Query::nearest_abs(0.2),
        )
        .unwrap();
        assert_eq!(r.samples_used, 3);
        assert_eq!(sampled_params(&r.trace), vec![0.0, 1.0, 0.5]);
        assert_eq!(r.x_star, 0.5);
        assert!((r.distance - 0.3).abs() < 1e-15);
        replay(&r.trace).unwrap();
    }

    #[test]
    fn farthest_on_constant_curve() {
        let curve = Curve::constant(Point::from_xy(0.0, 1.0));
        let r = solve(InstrumentedCurve::new(curve), &Query::farthest_abs(0.2)).unwrap();
        assert_eq!(r.distance, 1.0);
        assert!(r.certified_upper <= 1.2 + 1e-12);
        assert_eq!(r.distance, r.certified_lower);
        replay(&r.trace).unwrap();
    }

    #[test]
    fn relative_nearest_on_segment() {
        let r = solve(
            InstrumentedCurve::new(segment_curve()),
            &Query::nearest_rel(0.5),
        )
        .unwrap();
        assert!(r.distance <= 1.5 * 0.3 + 1e-12);
        assert!(r.certified_lower > 0.0);
        assert!(r.distance / r.certified_lower <= 1.5 + 1e-12);
        replay(&r.trace).unwrap();
    }

    #[test]
    fn epsilon_half_or_more_is_rejected() {
        let curve = Curve::constant(Point::from_xy(0.0, 1.0));
        assert!(matches!(
            solve(InstrumentedCurve::new(curve), &Query::nearest_abs(0.5)),
            Err(SolveError::InvalidQuery { .. })
        ));
    }

    #[test]
    fn relative_query_on_curve_through_origin_trips_the_budget() {
        // curve passes through the origin: relative nearest is unsolvable
        let raw = polyline_curve(&[Point::from_xy(-0.5, 0.0), Point::from_xy(0.5, 0.0)]).unwrap();
        let (curve, _) = normalize(&raw, &Point::origin(2)).unwrap();
        match solve(InstrumentedCurve::new(curve), &Query::nearest_rel(0.25)) {
            Err(SolveError::BudgetExceeded { partial, .. }) => {
                assert!(partial.distance < 0.1);
                assert!(partial.samples_used >= partial.trace.events.len() / 4);
            }
            other => panic!("expected budget exceeded, got {other:?}"),
        }
    }

    #[test]
    fn uniform_baseline_grid_counts() {
        let c = Curve::constant(Point::from_xy(0.0, 1.0));
        let r =
            uniform_baseline(InstrumentedCurve::new(c.clone()), &Query::nearest_abs(0.25)).unwrap();
        assert_eq!(r.samples_used, 3);
        assert_eq!(sampled_params(&r.trace), vec![0.0, 0.5, 1.0]);

        let r = uniform_baseline(InstrumentedCurve::new(c), &Query::nearest_abs(0.1)).unwrap();
        assert_eq!(r.samples_used, 6);
        assert_eq!(r.distance, 1.0);
        replay(&r.trace).unwrap();

        let r = uniform_baseline(
            InstrumentedCurve::new(segment_curve()),
            &Query::nearest_abs(0.05),
        )
        .unwrap();
        assert_eq!(r.samples_used, 11);
        assert!(r.distance <= 0.3 + 0.05 + 1e-12);

        assert!(matches!(
            uniform_baseline(
                InstrumentedCurve::new(segment_curve()),
                &Query::nearest_rel(0.1)
            ),
            Err(SolveError::BaselineNeedsAbsolute)
        ));
    }

    #[test]
    fn analytic_arc_solves_against_dense_scan() {
        // half circle of radius 1/2 around (0, 1.5), dipping to (0, 1)
        let spec = crate::curve::CurveSpec::CircleArc {
            center: Point::from_xy(0.0, 1.5),
            radius: 0.5,
            start_angle: std::f64::consts::PI,
            end_angle: 2.0 * std::f64::consts::PI,
        };
        let raw = spec.realize().unwrap();
        let (curve, _) = normalize(&raw, &Point::origin(2)).unwrap();
        // independent route: dense scan of the normalized curve
        let scan = (0..=100_000)
            .map(|i| curve.eval(i as f64 / 100_000.0).norm())
            .fold(f64::INFINITY, f64::min);
        let eps = 0.01;
        let r = solve(InstrumentedCurve::new(curve), &Query::nearest_abs(eps)).unwrap();
        assert!(r.distance <= scan + eps + 1e-9);
        assert!(r.certified_lower <= scan + 1e-9);
        replay(&r.trace).unwrap();
    }

    #[test]
    fn one_dimensional_curves_solve() {
        // d = 1: minimizing |f(x)| for a Lipschitz function on the line
        let raw = polyline_curve(&[
            Point::new(vec![0.8]),
            Point::new(vec![0.25]),
            Point::new(vec![0.6]),
        ])
        .unwrap();
        let (curve, back) = normalize(&raw, &Point::new(vec![0.0])).unwrap();
        let lam = raw.domain().1;
        let r = solve(InstrumentedCurve::new(curve), &Query::nearest_abs(0.01)).unwrap();
        assert!((back.dist_to_raw(r.distance) - 0.25).abs() <= 0.01 * lam + 1e-12);
        replay(&r.trace).unwrap();
    }

    #[test]
    fn determinism_traces_are_byte_identical() {
        let run = || {
            let r = solve(
                InstrumentedCurve::new(segment_curve()),
                &Query::nearest_abs(0.01),
            )
            .unwrap();
            format!("{:?}", r.trace)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn corrupted_midpoint_fails_replay() {
        let mut r = solve(
            InstrumentedCurve::new(segment_curve()),
            &Query::nearest_abs(0.2),
        )
        .unwrap();
        // perturb the recorded midpoint sample
        let idx = r
            .trace
            .events
            .iter()
            .position(|e| matches!(e, TraceEvent::Sample { t, .. } if *t == 0.5))
            .unwrap();
        if let TraceEvent::Sample { t, .. } = &mut r.trace.events[idx] {
            *t = 0.5000001;
        }
        let err = replay(&r.trace).unwrap_err();
        assert_eq!(err.check, crate::trace::ReplayCheck::InexactMidpoint);
    }
}
