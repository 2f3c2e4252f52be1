//! Execution traces of the adaptive solver and their replay verification.
//!
//! A trace records every sample, queue extraction and queue insertion in
//! order. [`replay`] re-checks the run-shape facts the analysis relies on
//! without re-running the solver: extracted keys can only move away from
//! the query, intervals at most `2 eps` wide are never subdivided in
//! absolute mode, midpoints are exact, inserted keys match the recorded
//! sample points, and the final sample set is a valid proof set.

use std::collections::HashMap;

use thiserror::Error;

use crate::ellipse::FocalEllipse;
use crate::point::Point;
use crate::proofset::ProofSet;
use crate::solver::{ErrorMode, Query, QueryKind};

#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent {
    Sample { t: f64, point: Point },
    Extract { key: f64, x1: f64, x2: f64 },
    Insert { key: f64, x1: f64, x2: f64 },
    Terminate { reason: TerminateReason },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminateReason {
    /// Absolute gap between incumbent and bound within epsilon.
    AbsoluteGap,
    /// Certified ratio within 1 + epsilon.
    RelativeRatio,
    /// Non-adaptive baseline finished its grid.
    GridExhausted,
}

#[derive(Clone, Debug)]
pub struct SolveTrace {
    pub query: Query,
    pub events: Vec<TraceEvent>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplayCheck {
    SmallIntervalSubdivided,
    NonMonotoneKeys,
    InexactMidpoint,
    InsertKeyMismatch,
    UnknownEndpoint,
    NotAProofSet,
    MalformedTrace,
}

#[derive(Debug, Error)]
#[error("replay check {check:?} failed at event {event_index}: {detail}")]
pub struct ReplayError {
    pub event_index: usize,
    pub check: ReplayCheck,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ReplayReport {
    pub samples: usize,
    pub extracts: usize,
    pub inserts: usize,
}

fn fail(i: usize, check: ReplayCheck, detail: String) -> ReplayError {
    ReplayError {
        event_index: i,
        check,
        detail,
    }
}

/// Verifies a recorded trace. Tolerances: key monotonicity and key
/// recomputation allow `1e-9` (the bound primitives are far tighter);
/// midpoints must be bit-exact.
pub fn replay(trace: &SolveTrace) -> Result<ReplayReport, ReplayError> {
    let q = &trace.query;
    let mut report = ReplayReport::default();
    let mut sampled: HashMap<u64, Point> = HashMap::new();
    let mut last_key: Option<f64> = None;

    for (i, ev) in trace.events.iter().enumerate() {
        match ev {
            TraceEvent::Sample { t, point } => {
                report.samples += 1;
                sampled.insert(t.to_bits(), point.clone());
            }
            TraceEvent::Insert { key, x1, x2 } => {
                report.inserts += 1;
                let p1 = sampled.get(&x1.to_bits()).ok_or_else(|| {
                    fail(
                        i,
                        ReplayCheck::UnknownEndpoint,
                        format!("x1={x1} never sampled"),
                    )
                })?;
                let p2 = sampled.get(&x2.to_bits()).ok_or_else(|| {
                    fail(
                        i,
                        ReplayCheck::UnknownEndpoint,
                        format!("x2={x2} never sampled"),
                    )
                })?;
                let e = FocalEllipse::new(p1.clone(), p2.clone(), x2 - x1)
                    .map_err(|e| fail(i, ReplayCheck::MalformedTrace, e.to_string()))?;
                let expect = match q.kind {
                    QueryKind::Nearest => e.closest_possible(),
                    QueryKind::Farthest => e.farthest_possible(),
                };
                if (expect - key).abs() > 1e-9 {
                    return Err(fail(
                        i,
                        ReplayCheck::InsertKeyMismatch,
                        format!("recorded {key}, recomputed {expect}"),
                    ));
                }
            }
            TraceEvent::Extract { key, x1, x2 } => {
                report.extracts += 1;
                if let Some(prev) = last_key {
                    let ok = match q.kind {
                        QueryKind::Nearest => *key >= prev - 1e-9,
                        QueryKind::Farthest => *key <= prev + 1e-9,
                    };
                    if !ok {
                        return Err(fail(
                            i,
                            ReplayCheck::NonMonotoneKeys,
                            format!("key {key} after {prev}"),
                        ));
                    }
                }
                last_key = Some(*key);

                let next = trace.events.get(i + 1);
                let terminal = matches!(next, Some(TraceEvent::Terminate { .. }));
                if !terminal {
                    if q.error == ErrorMode::Absolute && x2 - x1 <= 2.0 * q.epsilon {
                        return Err(fail(
                            i,
                            ReplayCheck::SmallIntervalSubdivided,
                            format!("interval [{x1}, {x2}] of width {} subdivided", x2 - x1),
                        ));
                    }
                    match next {
                        Some(TraceEvent::Sample { t, .. }) => {
                            let mid = (x1 + x2) / 2.0;
                            if t.to_bits() != mid.to_bits() {
                                return Err(fail(
                                    i + 1,
                                    ReplayCheck::InexactMidpoint,
                                    format!("sampled {t}, midpoint is {mid}"),
                                ));
                            }
                        }
                        _ => {
                            return Err(fail(
                                i,
                                ReplayCheck::MalformedTrace,
                                "extract not followed by sample or terminate".into(),
                            ))
                        }
                    }
                }
            }
            TraceEvent::Terminate { .. } => {
                if i + 1 != trace.events.len() {
                    return Err(fail(
                        i,
                        ReplayCheck::MalformedTrace,
                        "events after terminate".into(),
                    ));
                }
            }
        }
    }

    // the sampled set must certify the answer
    let mut entries: Vec<(f64, Point)> = Vec::new();
    for ev in &trace.events {
        if let TraceEvent::Sample { t, point } = ev {
            entries.push((*t, point.clone()));
        }
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (params, points): (Vec<f64>, Vec<Point>) = entries.into_iter().unzip();
    let ps = ProofSet::new(params, points, q.clone())
        .map_err(|e| fail(trace.events.len(), ReplayCheck::NotAProofSet, e.to_string()))?;
    let check = ps.check();
    if !check.pass {
        return Err(fail(
            trace.events.len(),
            ReplayCheck::NotAProofSet,
            format!("margin {}", check.margin),
        ));
    }
    Ok(report)
}
