//! `lipcurve` — nearest/farthest-point queries on Lipschitz curves, with
//! certificate files, adversarial instance generation and a benchmark
//! harness.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 sample budget or oracle cap exceeded.

use std::fs;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lipcurve::instances::{self, FamilySpec, InstanceBundle};
use lipcurve::proofset::{self, ProofSet, DEFAULT_GRID_CAP};
use lipcurve::trace::{SolveTrace, TerminateReason, TraceEvent};
use lipcurve::{
    normalize, parse_polyline, solve, solve_with_budget, uniform_baseline, BackMap, ErrorMode,
    InstrumentedCurve, PiecewiseLinear, Point, Query, QueryKind, RawCurve, SolveError, SolveResult,
};

const EXIT_VERIFY_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "lipcurve", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a nearest/farthest-point query on a curve.
    Query(QueryArgs),
    /// Generate an instance bundle (curve + exact ground-truth metadata).
    Gen(GenArgs),
    /// Verify a proof-set certificate against a bundle's curve.
    Verify(VerifyArgs),
    /// Run the adaptive-vs-baseline benchmark grid and write a CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Nearest,
    Farthest,
}

#[derive(Clone, Copy, ValueEnum)]
enum ErrorArg {
    Abs,
    Rel,
}

#[derive(Args)]
struct QueryArgs {
    /// Polyline file (one vertex per line, comma-separated coordinates).
    #[arg(long, conflicts_with = "builtin")]
    curve: Option<PathBuf>,
    /// Built-in curve: `segment` or `constant`.
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long, value_enum, default_value = "nearest")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "abs")]
    error: ErrorArg,
    #[arg(long)]
    epsilon: f64,
    /// Query point, comma-separated; defaults to the origin.
    #[arg(long)]
    query_point: Option<String>,
    /// Declared Lipschitz bound for a curve file (required with --curve).
    #[arg(long)]
    lipschitz: Option<f64>,
    /// Raw parameter domain for a curve file, as `a,b`.
    #[arg(long, default_value = "0,1")]
    domain: String,
    /// Write the normalized execution trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the sampled proof set to this file.
    #[arg(long)]
    proofset: Option<PathBuf>,
    /// Report normalized values instead of raw units.
    #[arg(long)]
    normalized: bool,
    /// Override the sample budget.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    /// Family: constant | spike | hidden-spike | rel-segments | random-polyline.
    family: String,
    #[arg(long)]
    epsilon: f64,
    /// Output bundle directory.
    #[arg(long)]
    out: PathBuf,
    /// Constant family: the point, comma-separated.
    #[arg(long)]
    point: Option<String>,
    /// Number of groups (spike, rel-segments).
    #[arg(long)]
    k: Option<usize>,
    /// Which group hides the distinguished spike (1-based).
    #[arg(long)]
    down: Option<usize>,
    /// Hidden-spike slot (1-based).
    #[arg(long)]
    slot: Option<usize>,
    /// Farthest-mode variant (rel-segments).
    #[arg(long)]
    farthest: bool,
    /// Vertex count (random-polyline).
    #[arg(long)]
    n: Option<usize>,
    /// Dimension (random-polyline).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Clearance from the origin (random-polyline).
    #[arg(long, default_value_t = 0.5)]
    clearance: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Proof-set certificate file.
    #[arg(long)]
    proofset: PathBuf,
    /// Bundle directory holding the curve the certificate refers to.
    #[arg(long)]
    curve: PathBuf,
    /// Override the certificate's query kind.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Override the certificate's error mode.
    #[arg(long, value_enum)]
    error: Option<ErrorArg>,
    /// Override the certificate's epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated families.
    #[arg(long, default_value = "constant,spike,hidden-spike,random-polyline")]
    families: String,
    /// Comma-separated epsilons.
    #[arg(long, default_value = "0.1,0.02")]
    epsilons: String,
    /// Comma-separated group counts.
    #[arg(long, default_value = "2,4")]
    ks: String,
    /// Comma-separated seeds; defaults to LP_SEED or 1.
    #[arg(long)]
    seeds: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Gnuplot summary path; defaults to the CSV path with extension `gp`.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    fn budget(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_BUDGET,
            message: msg.into(),
        }
    }

    fn fail(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VERIFY_FAIL,
            message: msg.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::fail(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Query(args) => cmd_query(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn parse_point(text: &str) -> Result<Point, CliError> {
    let coords: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse()).collect();
    match coords {
        Ok(c) if !c.is_empty() => Ok(Point::new(c)),
        _ => Err(CliError::usage(format!("cannot parse point `{text}`"))),
    }
}

fn parse_query(kind: KindArg, error: ErrorArg, epsilon: f64) -> Result<Query, CliError> {
    let q = Query {
        kind: match kind {
            KindArg::Nearest => QueryKind::Nearest,
            KindArg::Farthest => QueryKind::Farthest,
        },
        error: match error {
            ErrorArg::Abs => ErrorMode::Absolute,
            ErrorArg::Rel => ErrorMode::Relative,
        },
        epsilon,
    };
    q.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(q)
}

fn builtin_curve(name: &str) -> Result<(RawCurve, usize), CliError> {
    match name {
        // C(x) = (x - 0.5, 0.3) after normalization against the origin
        "segment" => {
            let raw =
                lipcurve::polyline_curve(&[Point::from_xy(-0.5, 0.3), Point::from_xy(0.5, 0.3)])
                    .map_err(|e| CliError::fail(e.to_string()))?;
            Ok((raw, 2))
        }
        "constant" => {
            let pl = PiecewiseLinear::new(
                vec![0.0, 1.0],
                vec![Point::from_xy(0.0, 1.0), Point::from_xy(0.0, 1.0)],
            )
            .map_err(|e| CliError::fail(e.to_string()))?;
            Ok((RawCurve::from_piecewise_linear(pl, 1.0), 2))
        }
        other => Err(CliError::usage(format!(
            "unknown builtin `{other}` (expected segment or constant)"
        ))),
    }
}

fn cmd_query(args: QueryArgs) -> Result<(), CliError> {
    let query = parse_query(args.kind, args.error, args.epsilon)?;

    let (raw, dim) = match (&args.curve, &args.builtin) {
        (Some(path), None) => {
            let lipschitz = args
                .lipschitz
                .ok_or_else(|| CliError::usage("--lipschitz is required for a curve file"))?;
            let parts: Vec<&str> = args.domain.split(',').collect();
            let (a, b) = match parts.as_slice() {
                [a, b] => (
                    a.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::usage(e.to_string()))?,
                    b.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::usage(e.to_string()))?,
                ),
                _ => return Err(CliError::usage("--domain must be `a,b`")),
            };
            if !a.is_finite() || !b.is_finite() || b <= a {
                return Err(CliError::usage(format!("empty domain [{a}, {b}]")));
            }
            let file = fs::File::open(path)?;
            let vertices =
                parse_polyline(BufReader::new(file)).map_err(|e| CliError::usage(e.to_string()))?;
            let dim = vertices[0].dim();
            let unit =
                lipcurve::polyline_curve(&vertices).map_err(|e| CliError::usage(e.to_string()))?;
            let arc = unit.domain().1;
            // traverse the vertex chain arc-length proportionally over [a, b]
            let actual = arc / (b - a);
            if lipschitz < actual * (1.0 - 1e-12) {
                return Err(CliError::usage(format!(
                    "declared Lipschitz bound {lipschitz} below the actual speed {actual}"
                )));
            }
            let pl = unit
                .as_piecewise_linear()
                .expect("polylines are piecewise linear")
                .with_domain(a, b)
                .map_err(|e| CliError::usage(e.to_string()))?;
            (RawCurve::from_piecewise_linear(pl, lipschitz), dim)
        }
        (None, Some(name)) => builtin_curve(name)?,
        _ => {
            return Err(CliError::usage(
                "exactly one of --curve or --builtin is required",
            ))
        }
    };

    let query_point = match &args.query_point {
        Some(text) => parse_point(text)?,
        None => Point::origin(dim),
    };
    let (curve, back) =
        normalize(&raw, &query_point).map_err(|e| CliError::usage(e.to_string()))?;

    let inst = InstrumentedCurve::new(curve);
    let outcome = match args.budget {
        Some(b) => solve_with_budget(inst, &query, b),
        None => solve(inst, &query),
    };
    let result = match outcome {
        Ok(r) => r,
        Err(SolveError::BudgetExceeded { budget, partial }) => {
            let (x, d) = if args.normalized {
                (partial.x_star, partial.distance)
            } else {
                (
                    back.param_to_raw(partial.x_star),
                    back.dist_to_raw(partial.distance),
                )
            };
            return Err(CliError::budget(format!(
                "sample budget {budget} exceeded after {} samples; best so far x={x} distance={d}",
                partial.samples_used
            )));
        }
        Err(e) => return Err(CliError::usage(e.to_string())),
    };

    if let Some(path) = &args.trace {
        let mut f = fs::File::create(path)?;
        write_trace(&mut f, &result.trace)?;
    }
    if let Some(path) = &args.proofset {
        let ps = proofset_from_trace(&result.trace).map_err(CliError::fail)?;
        let mut f = fs::File::create(path)?;
        ps.write_to(&mut f)?;
    }

    print_result(&result, &back, args.normalized);
    Ok(())
}

fn print_result(r: &SolveResult, back: &BackMap, normalized: bool) {
    if normalized {
        println!("x_star: {}", r.x_star);
        println!("point: {}", r.point);
        println!("distance: {}", r.distance);
        println!("certified: [{}, {}]", r.certified_lower, r.certified_upper);
    } else {
        println!("x_star: {}", back.param_to_raw(r.x_star));
        println!("point: {}", back.point_to_raw(&r.point));
        println!("distance: {}", back.dist_to_raw(r.distance));
        println!(
            "certified: [{}, {}]",
            back.dist_to_raw(r.certified_lower),
            back.dist_to_raw(r.certified_upper)
        );
    }
    println!("samples_used: {}", r.samples_used);
}

fn write_trace<W: Write>(w: &mut W, trace: &SolveTrace) -> std::io::Result<()> {
    let kind = match trace.query.kind {
        QueryKind::Nearest => "nearest",
        QueryKind::Farthest => "farthest",
    };
    let error = match trace.query.error {
        ErrorMode::Absolute => "absolute",
        ErrorMode::Relative => "relative",
    };
    writeln!(
        w,
        "# trace kind={kind} error={error} epsilon={}",
        trace.query.epsilon
    )?;
    for ev in &trace.events {
        match ev {
            TraceEvent::Sample { t, point } => {
                let coords: Vec<String> = point.coords().iter().map(|c| c.to_string()).collect();
                writeln!(w, "sample {t} {}", coords.join(","))?;
            }
            TraceEvent::Extract { key, x1, x2 } => writeln!(w, "extract {key} {x1} {x2}")?,
            TraceEvent::Insert { key, x1, x2 } => writeln!(w, "insert {key} {x1} {x2}")?,
            TraceEvent::Terminate { reason } => {
                let r = match reason {
                    TerminateReason::AbsoluteGap => "absolute-gap",
                    TerminateReason::RelativeRatio => "relative-ratio",
                    TerminateReason::GridExhausted => "grid-exhausted",
                };
                writeln!(w, "terminate {r}")?;
            }
        }
    }
    Ok(())
}

fn proofset_from_trace(trace: &SolveTrace) -> Result<ProofSet, String> {
    let mut entries: Vec<(f64, Point)> = trace
        .events
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Sample { t, point } => Some((*t, point.clone())),
            _ => None,
        })
        .collect();
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (params, points) = entries.into_iter().unzip();
    ProofSet::new(params, points, trace.query.clone()).map_err(|e| e.to_string())
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let seed = args.seed.unwrap_or_else(default_seed);
    let family = match args.family.as_str() {
        "constant" => {
            let p = parse_point(args.point.as_deref().unwrap_or("0,1"))?;
            FamilySpec::Constant {
                point: p.coords().to_vec(),
            }
        }
        "spike" => FamilySpec::Spike {
            k: args.k.ok_or_else(|| CliError::usage("spike needs --k"))?,
            down_index: args.down.unwrap_or(1),
            seed,
        },
        "hidden-spike" => FamilySpec::HiddenSpike {
            slot: args
                .slot
                .ok_or_else(|| CliError::usage("hidden-spike needs --slot"))?,
        },
        "rel-segments" => FamilySpec::RelSegments {
            k: args
                .k
                .ok_or_else(|| CliError::usage("rel-segments needs --k"))?,
            down_index: args.down.unwrap_or(1),
            seed,
            farthest: args.farthest,
        },
        "random-polyline" => FamilySpec::RandomPolyline {
            n_vertices: args.n.unwrap_or(8),
            dim: args.dim,
            seed,
            clearance: args.clearance,
        },
        other => return Err(CliError::usage(format!("unknown family `{other}`"))),
    };
    let bundle =
        instances::generate(&family, args.epsilon).map_err(|e| CliError::usage(e.to_string()))?;
    instances::write_bundle(&bundle, &args.out).map_err(|e| CliError::fail(e.to_string()))?;
    println!("family: {}", bundle.family.name());
    println!("epsilon: {}", bundle.epsilon);
    if let Some(v) = bundle.d_min {
        println!("d_min: {v}");
    }
    if let Some(v) = bundle.d_max {
        println!("d_max: {v}");
    }
    if let Some(v) = bundle.opt_upper {
        println!("opt_upper_bound: {v}");
    }
    println!("out: {}", args.out.display());
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let file = fs::File::open(&args.proofset)?;
    let ps = ProofSet::read_from(BufReader::new(file))
        .map_err(|e| CliError::usage(format!("{}: {e}", args.proofset.display())))?;
    let bundle = instances::read_bundle(&args.curve)
        .map_err(|e| CliError::usage(format!("{}: {e}", args.curve.display())))?;

    let mut query = ps.query().clone();
    if let Some(kind) = args.kind {
        query.kind = match kind {
            KindArg::Nearest => QueryKind::Nearest,
            KindArg::Farthest => QueryKind::Farthest,
        };
    }
    if let Some(error) = args.error {
        query.error = match error {
            ErrorArg::Abs => ErrorMode::Absolute,
            ErrorArg::Rel => ErrorMode::Relative,
        };
    }
    if let Some(eps) = args.epsilon {
        query.epsilon = eps;
    }

    // the certificate must describe this bundle's curve
    for (t, p) in ps.params().iter().zip(ps.points()) {
        let actual = bundle.curve.eval(*t);
        if actual.dist(p) > 1e-9 {
            return Err(CliError::usage(format!(
                "certificate point at t={t} disagrees with the bundle curve"
            )));
        }
    }
    let ps = ProofSet::new(ps.params().to_vec(), ps.points().to_vec(), query)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let report = ps.check();
    println!("verdict: {}", if report.pass { "pass" } else { "FAIL" });
    println!("upper: {}", report.upper);
    println!("lower: {}", report.lower);
    println!("margin: {}", report.margin);
    if report.pass {
        Ok(())
    } else {
        Err(CliError::fail("certificate does not certify the query"))
    }
}

fn default_seed() -> u64 {
    std::env::var("LP_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1)
}

struct BenchCell {
    family: String,
    k: usize,
    epsilon: f64,
    seed: u64,
}

struct BenchRow {
    cell: BenchCell,
    samples: usize,
    baseline_samples: usize,
    opt_est: Option<usize>,
    ratio: Option<f64>,
    millis: u128,
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    let items: Result<Vec<T>, _> = text.split(',').map(|t| t.trim().parse::<T>()).collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::usage(format!(
            "cannot parse {what} list `{text}`"
        ))),
    }
}

fn bench_instance(cell: &BenchCell) -> Result<(InstanceBundle, Query), String> {
    let eps = cell.epsilon;
    match cell.family.as_str() {
        "constant" => {
            let b = instances::constant_instance(Point::from_xy(0.0, 1.0), eps)
                .map_err(|e| e.to_string())?;
            Ok((b, Query::nearest_abs(eps)))
        }
        // the easy extreme: a unit segment, fully determined by two samples
        "segment" => {
            let pl = PiecewiseLinear::new(
                vec![0.0, 1.0],
                vec![Point::from_xy(-0.5, 0.3), Point::from_xy(0.5, 0.3)],
            )
            .map_err(|e| e.to_string())?;
            let b = InstanceBundle {
                curve: lipcurve::Curve::PiecewiseLinear(pl.clone()),
                epsilon: eps,
                family: FamilySpec::Constant {
                    point: vec![0.0, 0.3],
                },
                d_min: Some(pl.min_distance_to_origin().0),
                d_max: Some(pl.max_distance_to_origin().0),
                opt_upper: Some(3),
                spike_params: vec![],
            };
            Ok((b, Query::nearest_abs(eps)))
        }
        "spike" => {
            let down = 1 + (cell.seed as usize % cell.k.max(1));
            let b =
                instances::spike_family(cell.k, eps, down, cell.seed).map_err(|e| e.to_string())?;
            Ok((b, Query::nearest_abs(eps)))
        }
        "hidden-spike" => {
            let slots = (1.0 / (4.0 * eps)).floor() as usize;
            let slot = 1 + (cell.seed as usize % slots.max(1));
            let b = instances::hidden_spike_instance(eps, slot).map_err(|e| e.to_string())?;
            Ok((b, Query::nearest_abs(eps)))
        }
        "rel-segments" => {
            let down = 1 + (cell.seed as usize % cell.k.max(1));
            let b = instances::relative_segment_family(cell.k, eps, down, cell.seed, false)
                .map_err(|e| e.to_string())?;
            Ok((b, Query::nearest_rel(eps)))
        }
        // k doubles as the vertex count here
        "random-polyline" => {
            let b = instances::random_polyline(cell.k.max(2), 2, cell.seed, 0.5)
                .map_err(|e| e.to_string())?;
            Ok((b, Query::nearest_abs(eps)))
        }
        other => Err(format!("unknown family `{other}`")),
    }
}

fn run_cell(cell: BenchCell) -> Result<BenchRow, String> {
    let start = Instant::now();
    let (bundle, query) = bench_instance(&cell)?;
    let result =
        solve(InstrumentedCurve::new(bundle.curve.clone()), &query).map_err(|e| e.to_string())?;

    // the baseline grid is defined for absolute error; for a relative query
    // run it at the tolerance the relative run is guaranteed to beat
    let baseline_eps = match query.error {
        ErrorMode::Absolute => query.epsilon,
        ErrorMode::Relative => {
            let d_min = bundle.d_min.unwrap_or(result.distance);
            (query.epsilon * d_min / (1.0 + query.epsilon)).min(0.49)
        }
    };
    let baseline = uniform_baseline(
        InstrumentedCurve::new(bundle.curve.clone()),
        &Query {
            error: ErrorMode::Absolute,
            epsilon: baseline_eps,
            ..query.clone()
        },
    )
    .map_err(|e| e.to_string())?;

    let opt_est =
        proofset::min_proofset_grid(&bundle.curve, &query, query.epsilon / 8.0, DEFAULT_GRID_CAP)
            .ok()
            .map(|e| e.value);
    let ratio = opt_est.map(|opt| {
        let opt = opt as f64;
        result.samples_used as f64 / (opt * (2.0 + 1.0 / (query.epsilon * opt)).log2())
    });
    Ok(BenchRow {
        cell,
        samples: result.samples_used,
        baseline_samples: baseline.samples_used,
        opt_est,
        ratio,
        millis: start.elapsed().as_millis(),
    })
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let families: Vec<String> = parse_list(&args.families, "family")?;
    let epsilons: Vec<f64> = parse_list(&args.epsilons, "epsilon")?;
    let ks: Vec<usize> = parse_list(&args.ks, "k")?;
    let seeds: Vec<u64> = match &args.seeds {
        Some(text) => parse_list(text, "seed")?,
        None => vec![default_seed()],
    };
    if args.jobs == 0 {
        return Err(CliError::usage("--jobs must be positive"));
    }

    let mut cells = Vec::new();
    for family in &families {
        for &epsilon in &epsilons {
            for &k in &ks {
                for &seed in &seeds {
                    cells.push(BenchCell {
                        family: family.clone(),
                        k,
                        epsilon,
                        seed,
                    });
                }
            }
        }
    }

    let total = cells.len();
    let cells = Mutex::new(cells.into_iter().map(Some).collect::<Vec<_>>());
    let rows: Mutex<Vec<Option<Result<BenchRow, String>>>> =
        Mutex::new((0..total).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.min(total.max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= total {
                    break;
                }
                let cell = cells.lock().unwrap()[i].take().unwrap();
                let row = run_cell(cell);
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });

    let rows = rows.into_inner().unwrap();
    let mut csv = fs::File::create(&args.out)?;
    writeln!(
        csv,
        "family,k,epsilon,seed,samples,baseline_samples,opt_est,ratio,millis"
    )?;
    let mut written = 0usize;
    let mut summary_rows = Vec::new();
    for row in rows.into_iter().flatten() {
        let row = match row {
            Ok(row) => row,
            Err(msg) => {
                // an infeasible cell (e.g. more groups than regions) skips
                // its row rather than aborting the grid
                eprintln!("skipped cell: {msg}");
                continue;
            }
        };
        written += 1;
        let opt = row.opt_est.map_or("NA".to_string(), |v| v.to_string());
        let ratio = row.ratio.map_or("NA".to_string(), |v| v.to_string());
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            row.cell.family,
            row.cell.k,
            row.cell.epsilon,
            row.cell.seed,
            row.samples,
            row.baseline_samples,
            opt,
            ratio,
            row.millis
        )?;
        if let Some(r) = row.ratio {
            summary_rows.push((row.cell.family.clone(), row.cell.k, row.cell.epsilon, r));
        }
    }

    if written == 0 {
        return Err(CliError::fail("every benchmark cell failed"));
    }

    // gnuplot-compatible summary of ratio against epsilon^-1 / k
    let summary_path = args
        .summary
        .clone()
        .unwrap_or_else(|| args.out.with_extension("gp"));
    let mut gp = fs::File::create(&summary_path)?;
    writeln!(gp, "# family k epsilon inv_eps_over_k ratio")?;
    for (family, k, epsilon, ratio) in &summary_rows {
        let x = 1.0 / (epsilon * *k as f64);
        writeln!(gp, "{family} {k} {epsilon} {x} {ratio}")?;
    }
    println!("wrote {written} rows to {}", args.out.display());
    println!("summary: {}", summary_path.display());
    Ok(())
}
