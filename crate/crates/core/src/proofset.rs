//! Proof-set certificates and a grid-restricted minimum-proof-set oracle.
//!
//! A proof set is a sorted sample set containing both endpoints whose gap
//! ellipses certify that the best sample is within tolerance of the true
//! extremum. Producing one is the only way any algorithm can guarantee
//! correctness, which makes the smallest proof set the instance-specific
//! optimal sample count; [`min_proofset_grid`] computes that minimum
//! restricted to an arithmetic parameter grid.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::curve::Curve;
use crate::ellipse::{EllipseError, FocalEllipse};
use crate::point::Point;
use crate::solver::{ErrorMode, Query, QueryKind};

pub const DEFAULT_GRID_CAP: usize = 512;

const TIE_TOL: f64 = 1e-12;
const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ProofSetError {
    #[error("parameters must be strictly increasing")]
    Unsorted,
    #[error("proof set must contain both endpoints 0 and 1")]
    MissingEndpoints,
    #[error("need at least two samples, got {0}")]
    TooFew(usize),
    #[error("{params} parameters vs {points} points")]
    LengthMismatch { params: usize, points: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Ellipse(#[from] EllipseError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid step {delta} must be at most eps/4 = {limit}")]
    DeltaTooCoarse { delta: f64, limit: f64 },
    #[error("grid of {nodes} nodes exceeds the cap of {cap}; use a coarser delta")]
    CapExceeded { nodes: usize, cap: usize },
    #[error("no grid-restricted proof set exists (curve may reach the query point)")]
    Infeasible,
    #[error(transparent)]
    Ellipse(#[from] EllipseError),
}

/// Sorted sampled parameters with their cached points and the query they
/// are meant to certify.
#[derive(Clone, Debug)]
pub struct ProofSet {
    params: Vec<f64>,
    points: Vec<Point>,
    query: Query,
}

/// Outcome of [`ProofSet::check`]. `upper` is the best sampled distance,
/// `lower` the certified bound from the gap ellipses. In absolute mode the
/// margin is in distance units; in relative mode it is the ratio slack
/// `(1 + eps) - achieved ratio`. Non-negative margin means pass.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub pass: bool,
    pub upper: f64,
    pub lower: f64,
    pub margin: f64,
}

impl ProofSet {
    pub fn new(params: Vec<f64>, points: Vec<Point>, query: Query) -> Result<Self, ProofSetError> {
        if params.len() != points.len() {
            return Err(ProofSetError::LengthMismatch {
                params: params.len(),
                points: points.len(),
            });
        }
        if params.len() < 2 {
            return Err(ProofSetError::TooFew(params.len()));
        }
        if !params.windows(2).all(|w| w[0] < w[1]) {
            return Err(ProofSetError::Unsorted);
        }
        if params[0] != 0.0 || *params.last().unwrap() != 1.0 {
            return Err(ProofSetError::MissingEndpoints);
        }
        Ok(Self {
            params,
            points,
            query,
        })
    }

    /// Samples a curve at the given parameters (must include 0 and 1).
    pub fn from_curve(
        curve: &Curve,
        mut params: Vec<f64>,
        query: Query,
    ) -> Result<Self, ProofSetError> {
        params.sort_by(|a, b| a.partial_cmp(b).unwrap());
        params.dedup();
        let points = params.iter().map(|&t| curve.eval(t)).collect();
        Self::new(params, points, query)
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn query(&self) -> &Query {
        &self.query
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// A copy with the interior sample at `index` removed.
    pub fn without_interior(&self, index: usize) -> Result<Self, ProofSetError> {
        assert!(index > 0 && index + 1 < self.params.len(), "interior index");
        let mut params = self.params.clone();
        let mut points = self.points.clone();
        params.remove(index);
        points.remove(index);
        Self::new(params, points, self.query.clone())
    }

    fn gap_ellipse(&self, i: usize) -> FocalEllipse {
        FocalEllipse::new(
            self.points[i].clone(),
            self.points[i + 1].clone(),
            self.params[i + 1] - self.params[i],
        )
        .expect("proof-set samples are Lipschitz-consistent")
    }

    /// Certificate verdict with the computed quantities.
    pub fn check(&self) -> CheckReport {
        let eps = self.query.epsilon;
        match self.query.kind {
            QueryKind::Nearest => {
                let upper = self
                    .points
                    .iter()
                    .map(Point::norm)
                    .fold(f64::INFINITY, f64::min);
                let lower = (0..self.len() - 1)
                    .map(|i| self.gap_ellipse(i).closest_possible())
                    .fold(f64::INFINITY, f64::min);
                match self.query.error {
                    ErrorMode::Absolute => {
                        let margin = lower - (upper - eps);
                        CheckReport {
                            pass: margin >= -CHECK_TOL,
                            upper,
                            lower,
                            margin,
                        }
                    }
                    ErrorMode::Relative => {
                        if lower <= 0.0 {
                            CheckReport {
                                pass: false,
                                upper,
                                lower,
                                margin: f64::NEG_INFINITY,
                            }
                        } else {
                            let margin = (1.0 + eps) - upper / lower;
                            CheckReport {
                                pass: margin >= -CHECK_TOL,
                                upper,
                                lower,
                                margin,
                            }
                        }
                    }
                }
            }
            QueryKind::Farthest => {
                let incumbent = self
                    .points
                    .iter()
                    .map(Point::norm)
                    .fold(f64::NEG_INFINITY, f64::max);
                let reach = (0..self.len() - 1)
                    .map(|i| self.gap_ellipse(i).farthest_possible())
                    .fold(f64::NEG_INFINITY, f64::max);
                match self.query.error {
                    ErrorMode::Absolute => {
                        let margin = incumbent + eps - reach;
                        CheckReport {
                            pass: margin >= -CHECK_TOL,
                            upper: reach,
                            lower: incumbent,
                            margin,
                        }
                    }
                    ErrorMode::Relative => {
                        if incumbent <= 0.0 {
                            CheckReport {
                                pass: false,
                                upper: reach,
                                lower: incumbent,
                                margin: f64::NEG_INFINITY,
                            }
                        } else {
                            let margin = (1.0 + eps) - reach / incumbent;
                            CheckReport {
                                pass: margin >= -CHECK_TOL,
                                upper: reach,
                                lower: incumbent,
                                margin,
                            }
                        }
                    }
                }
            }
        }
    }

    /// Plain-text serialization: a header comment with the mode, then one
    /// line per sample, `parameter, coord1, ..., coordd`.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        let kind = match self.query.kind {
            QueryKind::Nearest => "nearest",
            QueryKind::Farthest => "farthest",
        };
        let error = match self.query.error {
            ErrorMode::Absolute => "absolute",
            ErrorMode::Relative => "relative",
        };
        writeln!(
            w,
            "# proofset kind={kind} error={error} epsilon={}",
            self.query.epsilon
        )?;
        for (t, p) in self.params.iter().zip(&self.points) {
            let coords: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
            writeln!(w, "{t}, {}", coords.join(", "))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self, ProofSetError> {
        let mut query: Option<Query> = None;
        let mut params = Vec::new();
        let mut points = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.starts_with("# proofset") {
                query = Some(parse_header(trimmed, idx + 1)?);
                continue;
            }
            let body = trimmed.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let nums: Result<Vec<f64>, _> =
                body.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let nums = nums.map_err(|e| ProofSetError::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            if nums.len() < 2 {
                return Err(ProofSetError::Parse {
                    line: idx + 1,
                    msg: "need a parameter and at least one coordinate".into(),
                });
            }
            params.push(nums[0]);
            points.push(Point::new(nums[1..].to_vec()));
        }
        let query = query.ok_or(ProofSetError::Parse {
            line: 0,
            msg: "missing `# proofset` header".into(),
        })?;
        Self::new(params, points, query)
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<Query, ProofSetError> {
    let mut kind = None;
    let mut error = None;
    let mut epsilon = None;
    for tok in line.split_whitespace() {
        if let Some((k, v)) = tok.split_once('=') {
            match k {
                "kind" => {
                    kind = Some(match v {
                        "nearest" => QueryKind::Nearest,
                        "farthest" => QueryKind::Farthest,
                        _ => {
                            return Err(ProofSetError::Parse {
                                line: lineno,
                                msg: format!("unknown kind {v}"),
                            })
                        }
                    })
                }
                "error" => {
                    error = Some(match v {
                        "absolute" => ErrorMode::Absolute,
                        "relative" => ErrorMode::Relative,
                        _ => {
                            return Err(ProofSetError::Parse {
                                line: lineno,
                                msg: format!("unknown error mode {v}"),
                            })
                        }
                    })
                }
                "epsilon" => {
                    epsilon = Some(v.parse::<f64>().map_err(|e| ProofSetError::Parse {
                        line: lineno,
                        msg: e.to_string(),
                    })?)
                }
                _ => {}
            }
        }
    }
    match (kind, error, epsilon) {
        (Some(kind), Some(error), Some(epsilon)) => Ok(Query {
            kind,
            error,
            epsilon,
        }),
        _ => Err(ProofSetError::Parse {
            line: lineno,
            msg: "header must carry kind=, error= and epsilon=".into(),
        }),
    }
}

/// Result of the grid-restricted minimum-proof-set search. `value` is an
/// upper bound on the continuum optimum (the grid minimum ranges over fewer
/// sets); `witness` is a minimizing set, passing through `minimizer`.
#[derive(Clone, Debug)]
pub struct OptEstimate {
    pub grid_step: f64,
    pub value: usize,
    pub witness: Vec<f64>,
    pub minimizer: f64,
}

/// Minimum proof-set size over subsets of the grid `{0, delta, 2 delta, ..., 1}`.
///
/// For each candidate extremizer node the admissible nodes and gap edges are
/// those compatible with that node being the best sample; two shortest-path
/// sweeps over the forward DAG give the smallest certificate through it.
pub fn min_proofset_grid(
    curve: &Curve,
    query: &Query,
    delta: f64,
    cap: usize,
) -> Result<OptEstimate, OracleError> {
    let eps = query.epsilon;
    if delta > eps / 4.0 {
        return Err(OracleError::DeltaTooCoarse {
            delta,
            limit: eps / 4.0,
        });
    }
    let mut ts: Vec<f64> = Vec::new();
    let mut i = 0usize;
    loop {
        let t = i as f64 * delta;
        if t >= 1.0 - delta / 2.0 {
            break;
        }
        ts.push(t);
        i += 1;
    }
    ts.push(1.0);
    let m = ts.len();
    if m > cap {
        return Err(OracleError::CapExceeded { nodes: m, cap });
    }

    let points: Vec<Point> = ts.iter().map(|&t| curve.eval(t)).collect();
    let norms: Vec<f64> = points.iter().map(Point::norm).collect();

    // pairwise gap bounds, computed once
    let mut bounds = vec![0.0f64; m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            let e = FocalEllipse::new(points[i].clone(), points[j].clone(), ts[j] - ts[i])?;
            bounds[i * m + j] = match query.kind {
                QueryKind::Nearest => e.closest_possible(),
                QueryKind::Farthest => e.farthest_possible(),
            };
        }
    }

    // candidates in quality order so the first minimal witness is the
    // natural one (best extremizer, then leftmost)
    let mut candidates: Vec<usize> = (0..m).collect();
    match query.kind {
        QueryKind::Nearest => {
            candidates.sort_by(|&a, &b| norms[a].total_cmp(&norms[b]).then(a.cmp(&b)))
        }
        QueryKind::Farthest => {
            candidates.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)))
        }
    }

    let node_ok = |norm: f64, v: f64| match query.kind {
        QueryKind::Nearest => norm >= v - TIE_TOL,
        QueryKind::Farthest => norm <= v + TIE_TOL,
    };
    let edge_ok = |bound: f64, v: f64| match (query.kind, query.error) {
        (QueryKind::Nearest, ErrorMode::Absolute) => bound >= v - eps - TIE_TOL,
        (QueryKind::Farthest, ErrorMode::Absolute) => bound <= v + eps + TIE_TOL,
        (QueryKind::Nearest, ErrorMode::Relative) => {
            bound > 0.0 && bound >= v / (1.0 + eps) - TIE_TOL
        }
        (QueryKind::Farthest, ErrorMode::Relative) => bound <= v * (1.0 + eps) + TIE_TOL,
    };

    let mut best: Option<(usize, usize, Vec<f64>)> = None; // (size, cand, witness)
    for &cand in &candidates {
        let v = norms[cand];
        if query.error == ErrorMode::Relative && v <= 0.0 {
            continue;
        }
        if !node_ok(norms[0], v) || !node_ok(norms[m - 1], v) || !node_ok(norms[cand], v) {
            continue;
        }
        let admissible: Vec<bool> = norms.iter().map(|&n| node_ok(n, v)).collect();

        // forward sweep from node 0
        let mut fwd = vec![usize::MAX; m];
        let mut fwd_parent = vec![usize::MAX; m];
        fwd[0] = 1;
        for j in 1..m {
            if !admissible[j] {
                continue;
            }
            for i in 0..j {
                if fwd[i] == usize::MAX || !edge_ok(bounds[i * m + j], v) {
                    continue;
                }
                if fwd[i] + 1 < fwd[j] {
                    fwd[j] = fwd[i] + 1;
                    fwd_parent[j] = i;
                }
            }
        }
        if fwd[cand] == usize::MAX {
            continue;
        }
        // backward sweep to node m-1
        let mut bwd = vec![usize::MAX; m];
        let mut bwd_parent = vec![usize::MAX; m];
        bwd[m - 1] = 1;
        for j in (0..m - 1).rev() {
            if !admissible[j] {
                continue;
            }
            for i in (j + 1)..m {
                if bwd[i] == usize::MAX || !edge_ok(bounds[j * m + i], v) {
                    continue;
                }
                if bwd[i] + 1 < bwd[j] {
                    bwd[j] = bwd[i] + 1;
                    bwd_parent[j] = i;
                }
            }
        }
        if bwd[cand] == usize::MAX {
            continue;
        }
        let size = fwd[cand] + bwd[cand] - 1;
        if best.as_ref().is_none_or(|(s, _, _)| size < *s) {
            let mut witness = Vec::with_capacity(size);
            let mut at = cand;
            while at != usize::MAX {
                witness.push(ts[at]);
                at = fwd_parent[at];
            }
            witness.reverse();
            let mut at = bwd_parent[cand];
            while at != usize::MAX {
                witness.push(ts[at]);
                at = bwd_parent[at];
            }
            best = Some((size, cand, witness));
        }
    }

    match best {
        Some((value, cand, witness)) => Ok(OptEstimate {
            grid_step: delta,
            value,
            witness,
            minimizer: ts[cand],
        }),
        None => Err(OracleError::Infeasible),
    }
}

/// Grid-oracle halving report: the minimum certificate size may at most
/// double (plus grid slack) when the tolerance is halved.
#[derive(Clone, Debug)]
pub struct DoublingCheck {
    pub value_eps: usize,
    pub value_half: usize,
    pub pass: bool,
}

pub fn opt_doubling_check(
    curve: &Curve,
    query: &Query,
    delta: f64,
    cap: usize,
) -> Result<DoublingCheck, OracleError> {
    let full = min_proofset_grid(curve, query, delta, cap)?;
    let half_query = Query {
        epsilon: query.epsilon / 2.0,
        ..query.clone()
    };
    let half = min_proofset_grid(curve, &half_query, delta, cap)?;
    Ok(DoublingCheck {
        value_eps: full.value,
        value_half: half.value,
        pass: half.value <= 2 * full.value + 2,
    })
}

/// A Lipschitz curve agreeing with the certificate's samples that defeats a
/// failed nearest/absolute certificate, detouring through the most violating
/// gap ellipse's closest point.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub curve: crate::curve::PiecewiseLinear,
    pub through: Point,
    pub gap: (f64, f64),
}

/// Builds the two-segment detour witness for a failing nearest/absolute
/// proof set. Returns `None` when the certificate actually passes (or the
/// mode is not nearest/absolute).
pub fn counterexample_curve(ps: &ProofSet) -> Option<Counterexample> {
    if ps.query().kind != QueryKind::Nearest || ps.query().error != ErrorMode::Absolute {
        return None;
    }
    let report = ps.check();
    if report.pass {
        return None;
    }
    // most violating gap
    let (gap_idx, _) = (0..ps.len() - 1)
        .map(|i| (i, ps.gap_ellipse(i).closest_possible()))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let through = ps.gap_ellipse(gap_idx).closest_point().point;

    let mut breaks = Vec::with_capacity(ps.len() + 1);
    let mut points = Vec::with_capacity(ps.len() + 1);
    for i in 0..ps.len() {
        breaks.push(ps.params()[i]);
        points.push(ps.points()[i].clone());
        if i == gap_idx {
            let len1 = ps.points()[i].dist(&through);
            let len2 = through.dist(&ps.points()[i + 1]);
            if len1 + len2 == 0.0 {
                return None;
            }
            let width = ps.params()[i + 1] - ps.params()[i];
            let t = ps.params()[i] + width * len1 / (len1 + len2);
            if t > ps.params()[i] && t < ps.params()[i + 1] {
                breaks.push(t);
                points.push(through.clone());
            }
        }
    }
    let curve = crate::curve::PiecewiseLinear::new(breaks, points).ok()?;
    Some(Counterexample {
        curve,
        through,
        gap: (ps.params()[gap_idx], ps.params()[gap_idx + 1]),
    })
}
