//! Generators for the instance families used by the benchmark harness and
//! the acceptance experiments, each with exact ground-truth metadata.
//!
//! All generated curves are already in canonical form (domain `[0,1]`,
//! Lipschitz constant 1, query at the origin) and are piecewise linear in
//! the parameter, so their exact nearest/farthest distances come in closed
//! form from the realized breakpoints. Generators are pure functions of
//! `(parameters, seed)`.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curve::{self, Curve, CurveError, PiecewiseLinear};
use crate::point::{vec_norm, Point};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("geometry unsolvable: spike ratio {lhs} must exceed {rhs}")]
    UnsolvableGeometry { lhs: f64, rhs: f64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("metadata error in {file}: {msg}")]
    Metadata { file: String, msg: String },
}

/// Instance family and its parameters; together with epsilon this
/// reconstructs a bundle exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    Constant {
        point: Vec<f64>,
    },
    Spike {
        k: usize,
        down_index: usize,
        seed: u64,
    },
    HiddenSpike {
        slot: usize,
    },
    RelSegments {
        k: usize,
        down_index: usize,
        seed: u64,
        farthest: bool,
    },
    RandomPolyline {
        n_vertices: usize,
        dim: usize,
        seed: u64,
        clearance: f64,
    },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Constant { .. } => "constant",
            FamilySpec::Spike { .. } => "spike",
            FamilySpec::HiddenSpike { .. } => "hidden-spike",
            FamilySpec::RelSegments { .. } => "rel-segments",
            FamilySpec::RandomPolyline { .. } => "random-polyline",
        }
    }
}

/// A generated curve with its ground truth.
#[derive(Clone)]
pub struct InstanceBundle {
    pub curve: Curve,
    pub epsilon: f64,
    pub family: FamilySpec,
    /// Exact minimum distance from the curve to the origin.
    pub d_min: Option<f64>,
    /// Exact maximum distance from the curve to the origin.
    pub d_max: Option<f64>,
    /// Known upper bound on the smallest proof-set size, where the family
    /// construction provides one.
    pub opt_upper: Option<usize>,
    /// Distinguished parameters (spike tips).
    pub spike_params: Vec<f64>,
}

pub fn generate(spec: &FamilySpec, epsilon: f64) -> Result<InstanceBundle, InstanceError> {
    match spec {
        FamilySpec::Constant { point } => constant_instance(Point::new(point.clone()), epsilon),
        FamilySpec::Spike {
            k,
            down_index,
            seed,
        } => spike_family(*k, epsilon, *down_index, *seed),
        FamilySpec::HiddenSpike { slot } => hidden_spike_instance(epsilon, *slot),
        FamilySpec::RelSegments {
            k,
            down_index,
            seed,
            farthest,
        } => relative_segment_family(*k, epsilon, *down_index, *seed, *farthest),
        FamilySpec::RandomPolyline {
            n_vertices,
            dim,
            seed,
            clearance,
        } => random_polyline(*n_vertices, *dim, *seed, *clearance),
    }
}

/// The constant "curve" `C(x) = p`. Every gap ellipse is a ball around `p`
/// of radius half the gap, so any certificate needs gaps of at most
/// `2 eps`: the worst case for any algorithm.
pub fn constant_instance(p: Point, epsilon: f64) -> Result<InstanceBundle, InstanceError> {
    let norm = p.norm();
    if norm <= epsilon {
        return Err(InstanceError::BadParameters(format!(
            "|p| = {norm} must exceed epsilon = {epsilon}"
        )));
    }
    let family = FamilySpec::Constant {
        point: p.coords().to_vec(),
    };
    Ok(InstanceBundle {
        curve: Curve::constant(p),
        epsilon,
        family,
        d_min: Some(norm),
        d_max: Some(norm),
        opt_upper: Some((1.0 / (2.0 * epsilon)).ceil() as usize + 1),
        spike_params: vec![],
    })
}

/// The k-group spike family. The parameter space splits into
/// `n = round(1/(3 eps))` regions grouped into `k` groups; each group hides
/// one spike in a seeded region. Spikes are vertical out-and-back
/// excursions of height `h = 1/(2n)` off a unit-height baseline traversed
/// left to right at unit speed; `k - 1` point away from the origin and the
/// spike of group `down_index` points at it. The curve is translated so the
/// down spike's tip sits straight above the origin, making
/// `d_min = 1 - h` exact. Three corners per spike plus the endpoints give a
/// certificate, so the smallest proof set has at most `3k + 2` samples.
pub fn spike_family(
    k: usize,
    epsilon: f64,
    down_index: usize,
    seed: u64,
) -> Result<InstanceBundle, InstanceError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(InstanceError::BadParameters(format!(
            "epsilon {epsilon} outside (0, 1/2)"
        )));
    }
    let n = (1.0 / (3.0 * epsilon)).round() as usize;
    if k < 1 || n < k {
        return Err(InstanceError::BadParameters(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    if !(1..=k).contains(&down_index) {
        return Err(InstanceError::BadParameters(format!(
            "down_index {down_index} outside [1, {k}]"
        )));
    }
    let nf = n as f64;
    let h = 1.0 / (2.0 * nf);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // one seeded spike region per group of regions
    let mut spike_regions = Vec::with_capacity(k);
    for g in 0..k {
        let lo = g * n / k;
        let hi = (g + 1) * n / k;
        spike_regions.push(rng.random_range(lo..hi));
    }
    let down_region = spike_regions[down_index - 1];
    // regions before the down spike, minus the earlier groups' spikes
    let flats_before_down = down_region - (down_index - 1);
    let x0 = -(flats_before_down as f64) / nf;

    let mut breaks = vec![0.0];
    let mut points = vec![Point::from_xy(x0, 1.0)];
    let mut flats = 0usize;
    let mut next_spike = 0usize; // index into spike_regions
    for r in 0..n {
        let x = x0 + flats as f64 / nf;
        let is_spike = next_spike < k && spike_regions[next_spike] == r;
        if is_spike {
            let dir = if next_spike == down_index - 1 {
                -1.0
            } else {
                1.0
            };
            breaks.push((2 * r + 1) as f64 / (2.0 * nf));
            points.push(Point::from_xy(x, 1.0 + dir * h));
            breaks.push((r + 1) as f64 / nf);
            points.push(Point::from_xy(x, 1.0));
            next_spike += 1;
        } else {
            flats += 1;
            breaks.push((r + 1) as f64 / nf);
            points.push(Point::from_xy(x0 + flats as f64 / nf, 1.0));
        }
    }
    let pl = PiecewiseLinear::new(breaks, points)?;
    let (d_max, _) = pl.max_distance_to_origin();
    let spike_param = (2 * down_region + 1) as f64 / (2.0 * nf);
    Ok(InstanceBundle {
        curve: Curve::PiecewiseLinear(pl),
        epsilon,
        family: FamilySpec::Spike {
            k,
            down_index,
            seed,
        },
        d_min: Some(1.0 - h),
        d_max: Some(d_max),
        opt_upper: Some(3 * k + 2),
        spike_params: vec![spike_param],
    })
}

/// One downward spike of height `2 eps` hidden in one of `floor(1/(4 eps))`
/// intervals of width `4 eps`; the curve is the constant `(0, 2.5 eps)`
/// everywhere else. `d_min = eps / 2` at the spike tip, a single sample
/// proves it, yet nothing short of scanning the slots can find it.
pub fn hidden_spike_instance(epsilon: f64, slot: usize) -> Result<InstanceBundle, InstanceError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(InstanceError::BadParameters(format!(
            "epsilon {epsilon} outside (0, 1/2)"
        )));
    }
    let slots = (1.0 / (4.0 * epsilon)).floor() as usize;
    if slots < 2 {
        return Err(InstanceError::BadParameters(format!(
            "epsilon {epsilon} leaves fewer than 2 slots"
        )));
    }
    if !(1..=slots).contains(&slot) {
        return Err(InstanceError::BadParameters(format!(
            "slot {slot} outside [1, {slots}]"
        )));
    }
    let base = Point::from_xy(0.0, 2.5 * epsilon);
    let tip = Point::from_xy(0.0, 0.5 * epsilon);
    let x1 = (slot - 1) as f64 * 4.0 * epsilon;
    let tip_t = x1 + 2.0 * epsilon;
    let end = (x1 + 4.0 * epsilon).min(1.0);

    let mut breaks = vec![0.0];
    let mut points = vec![base.clone()];
    if x1 > 0.0 {
        breaks.push(x1);
        points.push(base.clone());
    }
    breaks.push(tip_t);
    points.push(tip);
    breaks.push(end);
    points.push(base.clone());
    if end < 1.0 {
        breaks.push(1.0);
        points.push(base);
    }
    let pl = PiecewiseLinear::new(breaks, points)?;
    Ok(InstanceBundle {
        curve: Curve::PiecewiseLinear(pl),
        epsilon,
        family: FamilySpec::HiddenSpike { slot },
        d_min: Some(0.5 * epsilon),
        d_max: Some(2.5 * epsilon),
        opt_upper: Some(1),
        spike_params: vec![tip_t],
    })
}

/// The relative-error lower-bound family: `k` overlapping copies of a flat
/// run of length `L` at distance `D` from the origin, each interrupted by a
/// radial spike of half-length `S` at a seeded position. With
/// `S = L sqrt(eps)` (scaled by `1 + eps` for the farthest variant) and
/// `D/L = 1 / (2 sqrt(eps (2 + eps)))`, only the one distinguished spike
/// satisfies the relative tolerance, and finding it takes a binary search
/// per copy. Total parameter length is exactly 1.
pub fn relative_segment_family(
    k: usize,
    epsilon: f64,
    down_index: usize,
    seed: u64,
    farthest: bool,
) -> Result<InstanceBundle, InstanceError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(InstanceError::BadParameters(format!(
            "epsilon {epsilon} outside (0, 1)"
        )));
    }
    if k < 1 || !(1..=k).contains(&down_index) {
        return Err(InstanceError::BadParameters(format!(
            "need 1 <= down_index <= k, got down_index={down_index}, k={k}"
        )));
    }
    let scale = if farthest {
        (1.0 + epsilon) * epsilon.sqrt()
    } else {
        epsilon.sqrt()
    };
    // solvability of the construction
    let rhs = (epsilon * epsilon + 2.0 * epsilon).sqrt() / (2.0 * epsilon + 2.0);
    if scale <= rhs {
        return Err(InstanceError::UnsolvableGeometry { lhs: scale, rhs });
    }
    let kf = k as f64;
    let run = 1.0 / (kf * (1.0 + 2.0 * scale)); // L
    let spike = run * scale; // S
    let dist = run / (2.0 * (epsilon * (2.0 + epsilon)).sqrt()); // D
    let total = run + 2.0 * spike; // parameter length of one gadget

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut breaks = vec![0.0];
    let mut points = vec![Point::from_xy(-run / 2.0, dist)];
    let mut spike_params = Vec::with_capacity(k);
    let mut down_param = 0.0;
    for g in 0..k {
        let t0 = g as f64 / kf;
        let t1 = (g + 1) as f64 / kf;
        let left_to_right = g % 2 == 0;
        let offset: f64 = rng.random_range(0.05 * run..0.95 * run);
        let base_x = if left_to_right {
            -run / 2.0 + offset
        } else {
            run / 2.0 - offset
        };
        let base = Point::from_xy(base_x, dist);
        let radial = 1.0 / base.norm();
        let toward_origin = if farthest {
            g != down_index - 1
        } else {
            g == down_index - 1
        };
        let sgn = if toward_origin { -1.0 } else { 1.0 };
        let tip = base.scale(1.0 + sgn * spike * radial);
        let end_x = if left_to_right { run / 2.0 } else { -run / 2.0 };

        let frac = |local: f64| t0 + (local / total) * (t1 - t0);
        breaks.push(frac(offset));
        points.push(base.clone());
        let tip_t = frac(offset + spike);
        breaks.push(tip_t);
        points.push(tip);
        breaks.push(frac(offset + 2.0 * spike));
        points.push(base);
        breaks.push(t1);
        points.push(Point::from_xy(end_x, dist));

        spike_params.push(tip_t);
        if g == down_index - 1 {
            down_param = tip_t;
        }
    }
    let pl = PiecewiseLinear::new(breaks, points)?;
    let (d_min, _) = pl.min_distance_to_origin();
    let (d_max, _) = pl.max_distance_to_origin();
    Ok(InstanceBundle {
        curve: Curve::PiecewiseLinear(pl),
        epsilon,
        family: FamilySpec::RelSegments {
            k,
            down_index,
            seed,
            farthest,
        },
        d_min: Some(d_min),
        d_max: Some(d_max),
        opt_upper: Some(5 * k),
        spike_params: vec![down_param],
    })
}

/// Seeded random polyline corpus with exact metadata. `clearance` lower
/// bounds the normalized distance from the curve to the origin; shapes are
/// kept compact so that the normalized extrema stay in a range where both
/// absolute and relative queries are well posed.
pub fn random_polyline(
    n_vertices: usize,
    dim: usize,
    seed: u64,
    clearance: f64,
) -> Result<InstanceBundle, InstanceError> {
    if n_vertices < 2 {
        return Err(InstanceError::BadParameters(format!(
            "need at least 2 vertices, got {n_vertices}"
        )));
    }
    if dim < 1 {
        return Err(InstanceError::BadParameters(
            "dimension must be >= 1".into(),
        ));
    }
    if !(0.0..=1.0).contains(&clearance) {
        return Err(InstanceError::BadParameters(format!(
            "clearance {clearance} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..256 {
        // random open chain, centered at its centroid
        let mut verts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
        let mut arc = 0.0;
        for _ in 1..n_vertices {
            let dir = random_unit(&mut rng, dim);
            let len: f64 = rng.random_range(0.3..1.0);
            arc += len;
            let prev = verts.last().unwrap();
            verts.push(prev.iter().zip(&dir).map(|(p, d)| p + len * d).collect());
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|i| verts.iter().map(|v| v[i]).sum::<f64>() / n_vertices as f64)
            .collect();
        for v in &mut verts {
            for (vi, ci) in v.iter_mut().zip(&centroid) {
                *vi -= ci;
            }
        }
        let r_max = verts.iter().map(|v| vec_norm(v)).fold(0.0f64, f64::max);
        // place the chain so every point is at least target * arc away;
        // the band check below rejects placements that stick out too far
        let target = clearance + 0.05 + 0.2 * rng.random_range(0.0..1.0);
        let dir = random_unit(&mut rng, dim);
        let shift = target * arc + r_max;
        let placed: Vec<Point> = verts
            .iter()
            .map(|v| Point::new(v.iter().zip(&dir).map(|(vi, di)| vi + shift * di).collect()))
            .collect();
        let raw = curve::polyline_curve(&placed)?;
        let (normalized, _) = curve::normalize(&raw, &Point::origin(dim))?;
        let pl = normalized
            .as_piecewise_linear()
            .expect("polyline normalizes structurally")
            .clone();
        let (d_min, _) = pl.min_distance_to_origin();
        let (d_max, _) = pl.max_distance_to_origin();
        if d_min < clearance || d_max > 1.4 {
            continue;
        }
        return Ok(InstanceBundle {
            curve: Curve::PiecewiseLinear(pl),
            epsilon: 0.0,
            family: FamilySpec::RandomPolyline {
                n_vertices,
                dim,
                seed,
                clearance,
            },
            d_min: Some(d_min),
            d_max: Some(d_max),
            opt_upper: None,
            spike_params: vec![],
        });
    }
    Err(InstanceError::BadParameters(
        "could not place a chain in the clearance band; try another seed".into(),
    ))
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = vec_norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

// ---------------------------------------------------------------------------
// bundle directory format
// ---------------------------------------------------------------------------

/// Writes `curve.txt` (the vertex trace, informational) and `metadata.txt`
/// (authoritative: family, parameters, seed and exact ground truth) into
/// `dir`.
pub fn write_bundle(bundle: &InstanceBundle, dir: &Path) -> Result<(), InstanceError> {
    fs::create_dir_all(dir)?;
    let mut meta = fs::File::create(dir.join("metadata.txt"))?;
    writeln!(meta, "family={}", bundle.family.name())?;
    writeln!(meta, "epsilon={}", bundle.epsilon)?;
    match &bundle.family {
        FamilySpec::Constant { point } => {
            let coords: Vec<String> = point.iter().map(|c| c.to_string()).collect();
            writeln!(meta, "point={}", coords.join(","))?;
        }
        FamilySpec::Spike {
            k,
            down_index,
            seed,
        } => {
            writeln!(meta, "k={k}")?;
            writeln!(meta, "down={down_index}")?;
            writeln!(meta, "seed={seed}")?;
        }
        FamilySpec::HiddenSpike { slot } => writeln!(meta, "slot={slot}")?,
        FamilySpec::RelSegments {
            k,
            down_index,
            seed,
            farthest,
        } => {
            writeln!(meta, "k={k}")?;
            writeln!(meta, "down={down_index}")?;
            writeln!(meta, "seed={seed}")?;
            writeln!(meta, "farthest={farthest}")?;
        }
        FamilySpec::RandomPolyline {
            n_vertices,
            dim,
            seed,
            clearance,
        } => {
            writeln!(meta, "n_vertices={n_vertices}")?;
            writeln!(meta, "dim={dim}")?;
            writeln!(meta, "seed={seed}")?;
            writeln!(meta, "clearance={clearance}")?;
        }
    }
    if let Some(v) = bundle.d_min {
        writeln!(meta, "d_min={v}")?;
    }
    if let Some(v) = bundle.d_max {
        writeln!(meta, "d_max={v}")?;
    }
    if let Some(v) = bundle.opt_upper {
        writeln!(meta, "opt_upper_bound={v}")?;
    }
    if !bundle.spike_params.is_empty() {
        let ps: Vec<String> = bundle.spike_params.iter().map(|p| p.to_string()).collect();
        writeln!(meta, "spike_params={}", ps.join(","))?;
    }

    let mut curve_file = fs::File::create(dir.join("curve.txt"))?;
    writeln!(
        curve_file,
        "# vertex trace; the parametrization is defined by metadata.txt"
    )?;
    if let Curve::PiecewiseLinear(pl) = &bundle.curve {
        curve::write_polyline(&mut curve_file, pl.points())?;
    }
    Ok(())
}

/// Reads a bundle directory back by regenerating from the metadata and
/// cross-checking the stored ground truth.
pub fn read_bundle(dir: &Path) -> Result<InstanceBundle, InstanceError> {
    let path = dir.join("metadata.txt");
    let text = fs::read_to_string(&path)?;
    let file = path.display().to_string();
    let mut map = std::collections::HashMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let get = |k: &str| {
        map.get(k).cloned().ok_or_else(|| InstanceError::Metadata {
            file: file.clone(),
            msg: format!("missing key {k}"),
        })
    };
    let parse_f64 = |k: &str| -> Result<f64, InstanceError> {
        get(k)?.parse().map_err(|e| InstanceError::Metadata {
            file: file.clone(),
            msg: format!("{k}: {e}"),
        })
    };
    let parse_usize = |k: &str| -> Result<usize, InstanceError> {
        get(k)?.parse().map_err(|e| InstanceError::Metadata {
            file: file.clone(),
            msg: format!("{k}: {e}"),
        })
    };
    let parse_u64 = |k: &str| -> Result<u64, InstanceError> {
        get(k)?.parse().map_err(|e| InstanceError::Metadata {
            file: file.clone(),
            msg: format!("{k}: {e}"),
        })
    };

    let epsilon = parse_f64("epsilon")?;
    let family = match get("family")?.as_str() {
        "constant" => {
            let coords: Result<Vec<f64>, _> =
                get("point")?.split(',').map(|t| t.trim().parse()).collect();
            FamilySpec::Constant {
                point: coords.map_err(|e| InstanceError::Metadata {
                    file: file.clone(),
                    msg: format!("point: {e}"),
                })?,
            }
        }
        "spike" => FamilySpec::Spike {
            k: parse_usize("k")?,
            down_index: parse_usize("down")?,
            seed: parse_u64("seed")?,
        },
        "hidden-spike" => FamilySpec::HiddenSpike {
            slot: parse_usize("slot")?,
        },
        "rel-segments" => FamilySpec::RelSegments {
            k: parse_usize("k")?,
            down_index: parse_usize("down")?,
            seed: parse_u64("seed")?,
            farthest: get("farthest")? == "true",
        },
        "random-polyline" => FamilySpec::RandomPolyline {
            n_vertices: parse_usize("n_vertices")?,
            dim: parse_usize("dim")?,
            seed: parse_u64("seed")?,
            clearance: parse_f64("clearance")?,
        },
        other => {
            return Err(InstanceError::Metadata {
                file,
                msg: format!("unknown family {other}"),
            })
        }
    };
    let bundle = generate(&family, epsilon)?;
    if let Some(stored) = map.get("d_min") {
        let stored: f64 = stored.parse().map_err(|e| InstanceError::Metadata {
            file: file.clone(),
            msg: format!("d_min: {e}"),
        })?;
        let regen = bundle.d_min.unwrap_or(f64::NAN);
        if (stored - regen).abs() > 1e-12 {
            return Err(InstanceError::Metadata {
                file,
                msg: format!("stored d_min {stored} disagrees with regenerated {regen}"),
            });
        }
    }
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::verify_lipschitz;

    #[test]
    fn constant_instance_counts() {
        let b = constant_instance(Point::from_xy(0.0, 1.0), 0.1).unwrap();
        assert_eq!(b.opt_upper, Some(6));
        assert_eq!(b.d_min, Some(1.0));
        let b = constant_instance(Point::from_xy(0.0, 1.0), 0.25).unwrap();
        assert_eq!(b.opt_upper, Some(3));
        // rotation invariance: same counts for a rotated point
        let b = constant_instance(Point::from_xy(0.6, 0.8), 0.1).unwrap();
        assert_eq!(b.opt_upper, Some(6));
        assert!((b.d_min.unwrap() - 1.0).abs() < 1e-15);
        // too close to the origin
        assert!(constant_instance(Point::from_xy(0.0, 0.05), 0.1).is_err());
    }

    #[test]
    fn spike_family_geometry() {
        // eps = 1/24 -> n = 8 regions, h = 1/16
        let b = spike_family(4, 1.0 / 24.0, 2, 7).unwrap();
        let pl = match &b.curve {
            Curve::PiecewiseLinear(pl) => pl,
            _ => unreachable!(),
        };
        assert_eq!(b.d_min, Some(1.0 - 1.0 / 16.0));
        assert_eq!(b.opt_upper, Some(14));
        assert_eq!(pl.domain(), (0.0, 1.0));
        // exact ground truth against the generic closed form
        let (dmin, tmin) = pl.min_distance_to_origin();
        assert!((dmin - (1.0 - 1.0 / 16.0)).abs() < 1e-15);
        assert!((tmin - b.spike_params[0]).abs() < 1e-15);
        // unit-speed everywhere, total length 1
        assert!(pl.max_speed() <= 1.0 + 1e-12);
        assert!((pl.total_arc_length() - 1.0).abs() < 1e-12);
        let rep = verify_lipschitz(&b.curve, 2000, 3);
        assert!(!rep.exceeds_bound);
        // down spike points at the origin: tip directly above it
        let tip = b.curve.eval(b.spike_params[0]);
        assert!(tip.coords()[0].abs() < 1e-15);
    }

    #[test]
    fn spike_family_single_group() {
        let b = spike_family(1, 1.0 / 24.0, 1, 11).unwrap();
        assert_eq!(b.opt_upper, Some(5));
        assert!((b.d_min.unwrap() - (1.0 - 1.0 / 16.0)).abs() < 1e-15);
    }

    #[test]
    fn spike_family_rejects_too_many_groups() {
        // eps = 1/24 -> n = 8 < 16
        assert!(matches!(
            spike_family(16, 1.0 / 24.0, 1, 0),
            Err(InstanceError::BadParameters(_))
        ));
    }

    #[test]
    fn hidden_spike_formulas() {
        let b = hidden_spike_instance(0.05, 3).unwrap();
        assert_eq!(b.d_min, Some(0.025));
        assert_eq!(b.d_max, Some(0.125));
        assert_eq!(b.opt_upper, Some(1));
        assert!((b.spike_params[0] - 0.5).abs() < 1e-12);
        let tip = b.curve.eval(b.spike_params[0]);
        assert!(tip.dist(&Point::from_xy(0.0, 0.025)) < 1e-12);
        // outside the spike interval the curve is indistinguishable from
        // the flat instance
        for t in [0.0, 0.1, 0.39, 0.61, 0.8, 1.0] {
            assert!(
                b.curve.eval(t).dist(&Point::from_xy(0.0, 0.125)) < 1e-12,
                "t={t}"
            );
        }
        // slot boundaries always read the baseline value
        for slot in 1..=5usize {
            let x = (slot - 1) as f64 * 0.2;
            assert!(b.curve.eval(x).dist(&Point::from_xy(0.0, 0.125)) < 1e-12);
        }
    }

    #[test]
    fn hidden_spike_non_integer_slots_pad_flat() {
        // 1/(4 eps) = 4.16..: 4 slots, padding after the last one
        let eps = 0.06;
        let b = hidden_spike_instance(eps, 4).unwrap();
        assert_eq!(b.d_min, Some(0.03));
        let pl = match &b.curve {
            Curve::PiecewiseLinear(pl) => pl,
            _ => unreachable!(),
        };
        assert_eq!(pl.domain(), (0.0, 1.0));
        assert!(b.curve.eval(1.0).dist(&Point::from_xy(0.0, 2.5 * eps)) < 1e-12);
    }

    #[test]
    fn rel_segments_geometry() {
        // k=1, eps=0.25: S/L = 0.5, D/L = 2/3, inequality 0.5 > 0.3
        let b = relative_segment_family(1, 0.25, 1, 5, false).unwrap();
        let pl = match &b.curve {
            Curve::PiecewiseLinear(pl) => pl,
            _ => unreachable!(),
        };
        assert_eq!(pl.domain(), (0.0, 1.0));
        assert!(pl.max_speed() <= 1.0 + 1e-12);
        let run = 1.0 / (1.0 + 2.0 * 0.5);
        let dist = run * 2.0 / 3.0;
        // baseline sits at D; the lone spike dips toward the origin
        let d_min = b.d_min.unwrap();
        assert!(d_min < dist / 1.25, "d_min {d_min} vs D {dist}");

        // only spike parameters satisfy the relative tolerance (dense scan)
        let limit = (1.0 + b.epsilon) * d_min;
        let spike_t = b.spike_params[0];
        let spike_halfwidth = run * 0.5 / (run + 2.0 * run * 0.5);
        for i in 0..=20_000 {
            let t = i as f64 / 20_000.0;
            let n = b.curve.eval(t).norm();
            if n <= limit {
                assert!(
                    (t - spike_t).abs() <= spike_halfwidth,
                    "qualifying t={t} far from the spike at {spike_t}"
                );
            }
        }
    }

    #[test]
    fn rel_segments_farthest_flip() {
        let b = relative_segment_family(2, 0.25, 2, 9, true).unwrap();
        // S = (1 + eps) sqrt(eps) L
        let scale = 1.25 * 0.5;
        let run = 1.0 / (2.0 * (1.0 + 2.0 * scale));
        let d_max = b.d_max.unwrap();
        let dist = run / (2.0 * (0.25f64 * 2.25).sqrt());
        assert!(d_max > dist, "spike must extend past the baseline");
        // dense scan: only the distinguished spike reaches past d_max/(1+eps)
        let limit = d_max / 1.25;
        let spike_t = b.spike_params[0];
        for i in 0..=20_000 {
            let t = i as f64 / 20_000.0;
            let n = b.curve.eval(t).norm();
            if n >= limit {
                assert!((t - spike_t).abs() < 0.2, "qualifying t={t}");
            }
        }
    }

    #[test]
    fn random_polyline_clearance_band() {
        for seed in 0..30u64 {
            let b = random_polyline(8, 2, seed, 0.5).unwrap();
            let d_min = b.d_min.unwrap();
            let d_max = b.d_max.unwrap();
            assert!(d_min >= 0.5, "seed {seed}: d_min {d_min}");
            assert!(d_max <= 1.4, "seed {seed}: d_max {d_max}");
            let rep = verify_lipschitz(&b.curve, 500, seed);
            assert!(!rep.exceeds_bound);
        }
        // 3d corpus exercises the plane-reduction paths
        let b = random_polyline(6, 3, 1, 0.5).unwrap();
        assert_eq!(b.curve.dim(), 3);
    }

    #[test]
    fn every_family_is_normalized_and_lipschitz() {
        let bundles = [
            constant_instance(Point::from_xy(0.3, 0.9), 0.1).unwrap(),
            spike_family(4, 1.0 / 96.0, 3, 13).unwrap(),
            hidden_spike_instance(0.05, 2).unwrap(),
            relative_segment_family(3, 0.2, 2, 21, false).unwrap(),
            relative_segment_family(2, 0.2, 1, 22, true).unwrap(),
            random_polyline(8, 2, 5, 0.5).unwrap(),
        ];
        for b in &bundles {
            let rep = verify_lipschitz(&b.curve, 1500, 99);
            assert!(
                !rep.exceeds_bound,
                "{}: max ratio {}",
                b.family.name(),
                rep.max_ratio
            );
            if let Curve::PiecewiseLinear(pl) = &b.curve {
                assert_eq!(pl.domain(), (0.0, 1.0), "{}", b.family.name());
                // the stored ground truth matches the realized curve
                if let Some(d_min) = b.d_min {
                    let (exact, _) = pl.min_distance_to_origin();
                    assert!((exact - d_min).abs() < 1e-12, "{}", b.family.name());
                }
                if let Some(d_max) = b.d_max {
                    let (exact, _) = pl.max_distance_to_origin();
                    assert!((exact - d_max).abs() < 1e-12, "{}", b.family.name());
                }
            }
        }
    }

    #[test]
    fn generators_are_reproducible() {
        let a = spike_family(4, 1.0 / 96.0, 3, 42).unwrap();
        let b = spike_family(4, 1.0 / 96.0, 3, 42).unwrap();
        let (pa, pb) = match (&a.curve, &b.curve) {
            (Curve::PiecewiseLinear(pa), Curve::PiecewiseLinear(pb)) => (pa, pb),
            _ => unreachable!(),
        };
        assert_eq!(pa.breaks(), pb.breaks());
        assert_eq!(pa.points(), pb.points());
    }

    #[test]
    fn bundle_directory_roundtrip() {
        let dir = std::env::temp_dir().join(format!("lipcurve-bundle-{}", std::process::id()));
        let b = spike_family(4, 1.0 / 24.0, 2, 7).unwrap();
        write_bundle(&b, &dir).unwrap();
        let back = read_bundle(&dir).unwrap();
        assert_eq!(back.family, b.family);
        assert_eq!(back.d_min, b.d_min);
        assert_eq!(back.opt_upper, b.opt_upper);
        std::fs::remove_dir_all(&dir).ok();
    }
}
