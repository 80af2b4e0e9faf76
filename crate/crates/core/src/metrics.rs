//! Pseudometrics, multimetrics, point clouds and the Hausdorff distance.
//!
//! Pseudometrics are descriptors evaluated structurally; axioms of the
//! numeric kinds are audited by [`check_axioms`] rather than assumed,
//! because remetrized descriptors are finite truncations.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::remetrize::{BanachPowerMetric, RemetrizedPseudometric};
use crate::rng::Rng;
use crate::spaces::Point;

/// A pseudometric on points: symmetric, nonnegative, zero on the
/// diagonal, triangle inequality. Distinct points may be at distance 0.
#[derive(Debug, Clone, PartialEq)]
pub enum PseudometricDescriptor {
    Euclidean,
    SupNorm,
    /// `d(x, y) = |x_i - y_i|`.
    Coordinate(usize),
    /// `d(x, y) = max_k w_k * |x_{i_k} - y_{i_k}|`. Weights are not
    /// validated here; `check_axioms` flags descriptors that fail the
    /// pseudometric axioms.
    WeightedMax(Vec<(usize, f64)>),
    /// Pointwise maximum of the members (directed closure element).
    MaxOf(Vec<PseudometricDescriptor>),
    /// Hausdorff lift of the base pseudometric; on single points it
    /// coincides with the base, on clouds use [`hausdorff`].
    HausdorffLift(Box<PseudometricDescriptor>),
    /// Truncated `d̂(x,y) = sup_n max_{f in F^n} alpha_n d(f(x), f(y))`.
    Remetrized(Arc<RemetrizedPseudometric>),
    /// Truncated `d̂(x,y) = sup_n sup_{f in F^n} a^n d(f(x), f(y))`.
    BanachPower(Arc<BanachPowerMetric>),
}

/// A non-empty family of pseudometrics; a multimetric when it separates
/// points.
#[derive(Debug, Clone, PartialEq)]
pub struct Multimetric {
    members: Vec<PseudometricDescriptor>,
    separates_points_declared: bool,
}

impl Multimetric {
    pub fn new(
        members: Vec<PseudometricDescriptor>,
        separates_points_declared: bool,
    ) -> Result<Self, MetricError> {
        if members.is_empty() {
            return Err(MetricError::EmptyFamily);
        }
        Ok(Multimetric {
            members,
            separates_points_declared,
        })
    }

    pub fn members(&self) -> &[PseudometricDescriptor] {
        &self.members
    }

    pub fn separates_points_declared(&self) -> bool {
        self.separates_points_declared
    }
}

/// Finite non-empty point set standing in for a compact set.
#[derive(Debug, Clone, PartialEq)]
pub struct Cloud {
    points: Vec<Point>,
    dedup_tol: f64,
}

impl Cloud {
    /// Deduplicates under the Euclidean metric at `dedup_tol`, keeping
    /// the first occurrence (deterministic).
    pub fn new(points: Vec<Point>, dedup_tol: f64) -> Result<Self, MetricError> {
        if points.is_empty() {
            return Err(MetricError::EmptyCloud);
        }
        if !(dedup_tol >= 0.0) {
            return Err(MetricError::NegativeTolerance);
        }
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(MetricError::DimMismatch {
                expected: dim,
                got: points.iter().map(Point::dim).find(|d| *d != dim).unwrap_or(dim),
            });
        }
        Ok(Cloud {
            points: dedup(points, dedup_tol),
            dedup_tol,
        })
    }

    pub fn from_scalars(xs: &[f64], dedup_tol: f64) -> Result<Self, MetricError> {
        Cloud::new(xs.iter().map(|&x| Point::scalar(x)).collect(), dedup_tol)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }
}

fn dedup(points: Vec<Point>, tol: f64) -> Vec<Point> {
    let dim = points[0].dim();
    if tol == 0.0 {
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            let key: Vec<u64> = p.coords().iter().map(|c| c.to_bits()).collect();
            if seen.insert(key) {
                out.push(p);
            }
        }
        return out;
    }
    if dim <= 3 {
        // voxel hash: only neighboring voxels can hold a point within tol
        let mut grid: BTreeMap<[i64; 3], Vec<usize>> = BTreeMap::new();
        let mut out: Vec<Point> = Vec::with_capacity(points.len());
        let voxel = |p: &Point| -> [i64; 3] {
            let mut v = [0i64; 3];
            for i in 0..dim {
                v[i] = libm::floor(p.coord(i) / tol) as i64;
            }
            v
        };
        'next: for p in points {
            let base = voxel(&p);
            // unused axes must scan only offset 0, so it comes first
            let deltas = [0i64, -1, 1];
            for &dx in &deltas {
                for &dy in &deltas[..if dim >= 2 { 3 } else { 1 }] {
                    for &dz in &deltas[..if dim >= 3 { 3 } else { 1 }] {
                        let key = [base[0] + dx, base[1] + dy, base[2] + dz];
                        if let Some(ids) = grid.get(&key) {
                            for &i in ids {
                                if euclid(&out[i], &p) <= tol {
                                    continue 'next;
                                }
                            }
                        }
                    }
                }
            }
            grid.entry(base).or_default().push(out.len());
            out.push(p);
        }
        return out;
    }
    // high dimensions stay small in practice; quadratic scan
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.iter().all(|q| euclid(q, &p) > tol) {
            out.push(p);
        }
    }
    out
}

fn euclid(x: &Point, y: &Point) -> f64 {
    let s: f64 = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    libm::sqrt(s)
}

/// Errors from pseudometric evaluation and cloud construction.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricError {
    DimMismatch { expected: usize, got: usize },
    CoordinateOutOfRange { index: usize, dim: usize },
    EmptyCloud,
    EmptyFamily,
    NegativeTolerance,
    InvalidParameter(&'static str),
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::DimMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            MetricError::CoordinateOutOfRange { index, dim } => {
                write!(f, "coordinate index {index} out of range for dimension {dim}")
            }
            MetricError::EmptyCloud => write!(f, "clouds must be non-empty"),
            MetricError::EmptyFamily => write!(f, "pseudometric families must be non-empty"),
            MetricError::NegativeTolerance => write!(f, "tolerances must be nonnegative"),
            MetricError::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
        }
    }
}

/// Evaluates `d(x, y)`.
pub fn pd_eval(
    d: &PseudometricDescriptor,
    x: &Point,
    y: &Point,
) -> Result<f64, MetricError> {
    if x.dim() != y.dim() {
        return Err(MetricError::DimMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    use PseudometricDescriptor as Pd;
    match d {
        Pd::Euclidean => Ok(euclid(x, y)),
        Pd::SupNorm => Ok(x
            .coords()
            .iter()
            .zip(y.coords())
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)),
        Pd::Coordinate(i) => {
            if *i >= x.dim() {
                return Err(MetricError::CoordinateOutOfRange {
                    index: *i,
                    dim: x.dim(),
                });
            }
            Ok(libm::fabs(x.coord(*i) - y.coord(*i)))
        }
        Pd::WeightedMax(terms) => {
            // the max starts below zero on purpose: broken negative
            // weights must surface as negative distances for the axiom
            // checker rather than silently clamp to the zero pseudometric
            let mut acc = f64::NEG_INFINITY;
            for &(i, w) in terms {
                if i >= x.dim() {
                    return Err(MetricError::CoordinateOutOfRange { index: i, dim: x.dim() });
                }
                acc = acc.max(w * libm::fabs(x.coord(i) - y.coord(i)));
            }
            Ok(if terms.is_empty() { 0.0 } else { acc })
        }
        Pd::MaxOf(members) => {
            let mut acc = 0.0f64;
            for m in members {
                acc = acc.max(pd_eval(m, x, y)?);
            }
            Ok(acc)
        }
        Pd::HausdorffLift(base) => pd_eval(base, x, y),
        Pd::Remetrized(rm) => Ok(rm.eval(x, y).value),
        Pd::BanachPower(bp) => Ok(bp.eval(x, y)),
    }
}

/// `MaxOf` descriptor over a non-empty family; evaluates to the
/// pointwise maximum of its members.
pub fn directed_max(
    family: &[PseudometricDescriptor],
) -> Result<PseudometricDescriptor, MetricError> {
    if family.is_empty() {
        return Err(MetricError::EmptyFamily);
    }
    Ok(PseudometricDescriptor::MaxOf(family.to_vec()))
}

/// Hausdorff distance `max{max_a min_b d(a,b), max_b min_a d(b,a)}` by
/// exhaustive evaluation.
pub fn hausdorff(
    d: &PseudometricDescriptor,
    a: &Cloud,
    b: &Cloud,
) -> Result<f64, MetricError> {
    let one_sided = |from: &Cloud, to: &Cloud| -> Result<f64, MetricError> {
        let mut worst = 0.0f64;
        for p in from.points() {
            let mut best = f64::INFINITY;
            for q in to.points() {
                let v = pd_eval(d, p, q)?;
                if v < best {
                    best = v;
                }
            }
            if best > worst {
                worst = best;
            }
        }
        Ok(worst)
    };
    Ok(one_sided(a, b)?.max(one_sided(b, a)?))
}

/// `sup_{x,y in A} d(x, y)` over all pairs.
pub fn diameter(d: &PseudometricDescriptor, a: &Cloud) -> Result<f64, MetricError> {
    let pts = a.points();
    let mut acc = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            acc = acc.max(pd_eval(d, &pts[i], &pts[j])?);
        }
    }
    Ok(acc)
}

/// One witness of a violated pseudometric axiom; indices refer to the
/// sample cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub indices: [usize; 3],
    pub magnitude: f64,
}

/// Result of auditing a pseudometric on a sample cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub symmetry_violations: Vec<AxiomViolation>,
    pub triangle_violations: Vec<AxiomViolation>,
    pub diagonal_violations: Vec<AxiomViolation>,
    pub triples_checked: usize,
    pub exhaustive: bool,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.symmetry_violations.is_empty()
            && self.triangle_violations.is_empty()
            && self.diagonal_violations.is_empty()
    }
}

const AXIOM_TOL: f64 = 1e-9;
const MAX_WITNESSES: usize = 32;

/// Checks symmetry, triangle inequality and vanishing on the diagonal:
/// exhaustive over all index triples when the sample has at most 60
/// points, otherwise 10^5 seeded random triples.
pub fn check_axioms(
    d: &PseudometricDescriptor,
    sample: &Cloud,
    seed: u64,
) -> Result<AxiomReport, MetricError> {
    let pts = sample.points();
    let n = pts.len();
    let mut report = AxiomReport {
        symmetry_violations: Vec::new(),
        triangle_violations: Vec::new(),
        diagonal_violations: Vec::new(),
        triples_checked: 0,
        exhaustive: n <= 60,
    };

    // scale-aware slack
    let scale = diameter(d, sample)?.max(1.0);
    let tol = AXIOM_TOL * scale;

    let check_triple =
        |i: usize, j: usize, k: usize, report: &mut AxiomReport| -> Result<(), MetricError> {
            let dij = pd_eval(d, &pts[i], &pts[j])?;
            let dji = pd_eval(d, &pts[j], &pts[i])?;
            let djk = pd_eval(d, &pts[j], &pts[k])?;
            let dik = pd_eval(d, &pts[i], &pts[k])?;
            if libm::fabs(dij - dji) > tol && report.symmetry_violations.len() < MAX_WITNESSES {
                report.symmetry_violations.push(AxiomViolation {
                    indices: [i, j, j],
                    magnitude: libm::fabs(dij - dji),
                });
            }
            if dik > dij + djk + tol && report.triangle_violations.len() < MAX_WITNESSES {
                report.triangle_violations.push(AxiomViolation {
                    indices: [i, j, k],
                    magnitude: dik - (dij + djk),
                });
            }
            let dii = pd_eval(d, &pts[i], &pts[i])?;
            if libm::fabs(dii) > tol && report.diagonal_violations.len() < MAX_WITNESSES {
                report.diagonal_violations.push(AxiomViolation {
                    indices: [i, i, i],
                    magnitude: libm::fabs(dii),
                });
            }
            report.triples_checked += 1;
            Ok(())
        };

    if report.exhaustive {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    check_triple(i, j, k, &mut report)?;
                }
            }
        }
    } else {
        let mut rng = Rng::new(seed);
        for _ in 0..100_000 {
            let i = rng.index(n);
            let j = rng.index(n);
            let k = rng.index(n);
            check_triple(i, j, k, &mut report)?;
        }
    }
    Ok(report)
}
