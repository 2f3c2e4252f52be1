//! Adaptive nearest- and farthest-point queries on black-box Lipschitz
//! parametric curves.
//!
//! A curve is a map `C: [0,1] -> R^d` accessible only through point
//! evaluation, with a known speed bound (Lipschitz constant). Between two
//! samples the curve is trapped in a focal ellipse, which yields certified
//! distance bounds for unexplored parameter intervals; the solver subdivides
//! the most promising interval until the samples it holds certify the
//! answer to the requested tolerance, absolute or relative. The sampled set
//! is itself the certificate (a proof set) and can be re-verified
//! independently of the run that produced it.
//!
//! The crate also ships the supporting cast: instance generators whose
//! ground truth is exact, a grid-restricted minimum-certificate oracle, a
//! dense-boundary-sampling oracle for the ellipse primitives, and numeric
//! checkers for the geometric lemmas behind the solver's analysis.

pub mod curve;
pub mod ellipse;
pub mod instances;
pub mod lemmas;
pub mod oracle;
pub mod point;
pub mod proofset;
pub mod solver;
pub mod trace;

pub use curve::{
    normalize, parse_polyline, polyline_curve, verify_lipschitz, BackMap, Curve, CurveError,
    CurveSpec, InstrumentedCurve, LipschitzReport, PiecewiseLinear, RawCurve,
};
pub use ellipse::{ellipse_from_samples, EllipseError, Extremal, FocalEllipse};
pub use instances::{generate, FamilySpec, InstanceBundle, InstanceError};
pub use point::Point;
pub use proofset::{
    counterexample_curve, min_proofset_grid, opt_doubling_check, CheckReport, OptEstimate,
    ProofSet, ProofSetError,
};
pub use solver::{
    solve, solve_with_budget, uniform_baseline, ErrorMode, PartialSolve, Query, QueryKind,
    SolveError, SolveResult,
};
pub use trace::{replay, ReplayCheck, ReplayError, ReplayReport, SolveTrace, TraceEvent};
