//! The Hutchinson operator on finite point clouds, deterministic
//! attractor iteration, the chaos game and the symbolic coding map.
//!
//! `F(K) = union of f(K) over the family` acting on deduplicated clouds;
//! the deterministic iteration tracks the Hausdorff residual between
//! consecutive clouds and stops when it falls below tolerance.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::metrics::{hausdorff, Cloud, MetricError, Multimetric, PseudometricDescriptor};
use crate::rng::Rng;
use crate::spaces::{eval_map, IfsSystem, Point, SpaceError, Word};

#[derive(Debug, Clone, PartialEq)]
pub enum HutchError {
    EmptyCloud,
    /// A map image left the domain box of a system that did not declare
    /// itself self-mapping.
    ImageEscapesDomain { map_index: usize, point: Point },
    /// The coding-map orbit failed to settle within the depth cap; the
    /// last iterate and displacement are returned for diagnosis.
    NoContraction { last: Point, displacement: f64 },
    BadStream(&'static str),
    Space(SpaceError),
    Metric(MetricError),
}

impl From<SpaceError> for HutchError {
    fn from(e: SpaceError) -> Self {
        HutchError::Space(e)
    }
}

impl From<MetricError> for HutchError {
    fn from(e: MetricError) -> Self {
        HutchError::Metric(e)
    }
}

impl fmt::Display for HutchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HutchError::EmptyCloud => write!(f, "cloud must be non-empty"),
            HutchError::ImageEscapesDomain { map_index, .. } => write!(
                f,
                "map {map_index} sends a point outside the domain box of a system not declared self-mapping"
            ),
            HutchError::NoContraction { displacement, .. } => write!(
                f,
                "coding orbit did not settle; last displacement {displacement}"
            ),
            HutchError::BadStream(m) => write!(f, "invalid symbol stream: {m}"),
            HutchError::Space(e) => write!(f, "{e}"),
            HutchError::Metric(e) => write!(f, "{e}"),
        }
    }
}

fn guard_escape(ifs: &IfsSystem, map_index: usize, p: &Point) -> Result<(), HutchError> {
    if !ifs.self_mapping_declared() {
        let slack = 1e-9 * ifs.domain().diagonal().max(1.0);
        if !ifs.domain().contains(p, slack) {
            return Err(HutchError::ImageEscapesDomain {
                map_index,
                point: p.clone(),
            });
        }
    }
    Ok(())
}

/// One application of the Hutchinson operator; images are deduplicated
/// at the input cloud's tolerance.
pub fn hutchinson_step(ifs: &IfsSystem, k: &Cloud) -> Result<Cloud, HutchError> {
    if k.is_empty() {
        return Err(HutchError::EmptyCloud);
    }
    let mut out = Vec::with_capacity(k.len() * ifs.maps().len());
    for p in k.points() {
        for (mi, m) in ifs.maps().iter().enumerate() {
            let img = eval_map(m, p)?;
            guard_escape(ifs, mi, &img)?;
            out.push(img);
        }
    }
    Cloud::new(out, k.dedup_tol()).map_err(HutchError::Metric)
}

/// Trace of the deterministic iteration `K_{n+1} = F(K_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    /// `residuals[n] = d_H(K_n, K_{n+1})` for each executed step.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_cloud: Cloud,
}

/// Deterministic attractor iteration with the default voxel snapping of
/// `tol / 4`; see [`attractor_deterministic_with`].
pub fn attractor_deterministic(
    ifs: &IfsSystem,
    seed_cloud: &Cloud,
    stop_metric: &PseudometricDescriptor,
    tol: f64,
    max_iter: usize,
) -> Result<ConvergenceTrace, HutchError> {
    attractor_deterministic_with(ifs, seed_cloud, stop_metric, tol, max_iter, Some(tol / 4.0))
}

fn snap_cloud(k: &Cloud, r: f64) -> Result<Cloud, MetricError> {
    let snapped: Vec<Point> = k
        .points()
        .iter()
        .map(|p| {
            Point::new(
                p.coords()
                    .iter()
                    .map(|&c| libm::floor(c / r + 0.5) * r)
                    .collect(),
            )
            .expect("snapping preserves finiteness")
        })
        .collect();
    Cloud::new(snapped, k.dedup_tol())
}

/// Iterates the Hutchinson operator from a seed cloud until the
/// Hausdorff residual under `stop_metric` drops below `tol` or the
/// iteration budget runs out. `snap`, when set, rounds coordinates to a
/// voxel grid of that pitch after each step to keep clouds finite at the
/// cost of perturbing residuals by up to the pitch times sqrt(dim).
pub fn attractor_deterministic_with(
    ifs: &IfsSystem,
    seed_cloud: &Cloud,
    stop_metric: &PseudometricDescriptor,
    tol: f64,
    max_iter: usize,
    snap: Option<f64>,
) -> Result<ConvergenceTrace, HutchError> {
    if seed_cloud.is_empty() {
        return Err(HutchError::EmptyCloud);
    }
    if tol <= 0.0 {
        return Err(HutchError::Metric(MetricError::InvalidParameter(
            "tol must be positive",
        )));
    }
    let mut current = seed_cloud.clone();
    let mut residuals = Vec::new();
    let mut converged = false;
    let mut iterations = 0usize;
    while iterations < max_iter {
        let mut next = hutchinson_step(ifs, &current)?;
        if let Some(r) = snap {
            if r > 0.0 {
                next = snap_cloud(&next, r).map_err(HutchError::Metric)?;
            }
        }
        let residual = hausdorff(stop_metric, &current, &next).map_err(HutchError::Metric)?;
        residuals.push(residual);
        current = next;
        iterations += 1;
        if residual < tol {
            converged = true;
            break;
        }
    }
    Ok(ConvergenceTrace {
        residuals,
        iterations,
        converged,
        final_cloud: current,
    })
}

/// Random-orbit approximation of the attractor: from `start`, repeatedly
/// applies a map drawn by the pinned generator, keeping points only
/// after `burn_in` steps. The orbit is bit-exact per seed.
pub fn chaos_game(
    ifs: &IfsSystem,
    start: &Point,
    iterations: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Cloud, HutchError> {
    if iterations <= burn_in {
        return Err(HutchError::Metric(MetricError::InvalidParameter(
            "iterations must exceed burn_in",
        )));
    }
    let mut rng = Rng::new(seed);
    let mut x = start.clone();
    let mut kept = Vec::with_capacity(iterations - burn_in);
    for step in 0..iterations {
        let mi = rng.index(ifs.maps().len());
        x = eval_map(&ifs.maps()[mi], &x)?;
        guard_escape(ifs, mi, &x)?;
        if step >= burn_in {
            kept.push(x.clone());
        }
    }
    Cloud::new(kept, 0.0).map_err(HutchError::Metric)
}

/// An eventually periodic symbol stream: the letters of `preperiod`
/// followed by `period` repeated forever.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream {
    pub preperiod: Word,
    pub period: Word,
}

impl SymbolStream {
    pub fn new(preperiod: Word, period: Word) -> Result<Self, HutchError> {
        if period.is_empty() {
            return Err(HutchError::BadStream("period must be non-empty"));
        }
        Ok(SymbolStream { preperiod, period })
    }

    pub fn constant(letter: usize) -> Self {
        SymbolStream {
            preperiod: Word::empty(),
            period: Word::new(vec![letter]),
        }
    }

    pub fn letter(&self, i: usize) -> usize {
        let pre = self.preperiod.len();
        if i < pre {
            self.preperiod.letters()[i]
        } else {
            self.period.letters()[(i - pre) % self.period.len()]
        }
    }

    fn check_against(&self, ifs: &IfsSystem) -> Result<(), HutchError> {
        let n = ifs.maps().len();
        if self
            .preperiod
            .letters()
            .iter()
            .chain(self.period.letters())
            .any(|&l| l >= n)
        {
            return Err(HutchError::BadStream("letter out of range for the family"));
        }
        Ok(())
    }
}

/// The point a symbol stream codes, with the displacement at which the
/// orbit settled.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedPoint {
    pub point: Point,
    /// Last observed displacement between successive prefix images; an
    /// empirical settling radius, not an analytic error bound.
    pub radius: f64,
    pub depth: usize,
}

/// Evaluates the coding map at a stream: follows the nested images
/// `f_{s_0} o ... o f_{s_n}(x0)` until successive iterates are within
/// `tol` under every member of the multimetric.
pub fn coding_map(
    ifs: &IfsSystem,
    stream: &SymbolStream,
    x0: &Point,
    metrics: &Multimetric,
    tol: f64,
    depth_cap: usize,
) -> Result<CodedPoint, HutchError> {
    stream.check_against(ifs)?;
    if tol <= 0.0 || depth_cap == 0 {
        return Err(HutchError::Metric(MetricError::InvalidParameter(
            "need tol > 0 and depth_cap >= 1",
        )));
    }
    let prefix_image = |n: usize| -> Result<Point, HutchError> {
        // apply f_{s_{n-1}} first, f_{s_0} last (innermost letter deepest)
        let mut p = x0.clone();
        for i in (0..n).rev() {
            p = eval_map(&ifs.maps()[stream.letter(i)], &p)?;
        }
        Ok(p)
    };
    let mut prev = prefix_image(1)?;
    let mut displacement = f64::INFINITY;
    for n in 2..=depth_cap {
        let cur = prefix_image(n)?;
        displacement = 0.0;
        for d in metrics.members() {
            let v = crate::metrics::pd_eval(d, &prev, &cur).map_err(HutchError::Metric)?;
            displacement = displacement.max(v);
        }
        if displacement < tol {
            return Ok(CodedPoint {
                point: cur,
                radius: displacement,
                depth: n,
            });
        }
        prev = cur;
    }
    Err(HutchError::NoContraction {
        last: prev,
        displacement,
    })
}

/// Depth-`n` word cover of the attractor: the images of a base point
/// under every word of that length.
pub fn attractor_by_words(
    ifs: &IfsSystem,
    depth: usize,
    base: &Point,
    word_budget: usize,
) -> Result<Cloud, HutchError> {
    let words = crate::spaces::enumerate_words(ifs, depth, word_budget)?;
    let pts: Result<Vec<Point>, SpaceError> = words
        .iter()
        .map(|w| crate::spaces::eval_word(ifs, w, base))
        .collect();
    Cloud::new(pts?, 0.0).map_err(HutchError::Metric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::PseudometricDescriptor as Pd;
    use crate::spaces::{BuiltinName, DomainBox, IfsSystem, MapDescriptor};
    use alloc::vec;

    fn cantor_system() -> IfsSystem {
        IfsSystem::new(
            vec![
                MapDescriptor::scaling(1, 1.0 / 3.0, &[0.0]),
                MapDescriptor::scaling(1, 1.0 / 3.0, &[1.0]),
            ],
            DomainBox::interval(0.0, 1.0).unwrap(),
            true,
        )
        .unwrap()
    }

    fn fg_system() -> IfsSystem {
        IfsSystem::new(
            vec![
                MapDescriptor::Clamp1D { slope: 1.0, shift: -1.0, lo: 0.0, hi: 2.0 },
                MapDescriptor::Clamp1D { slope: 1.0, shift: 1.0, lo: 0.0, hi: 2.0 },
            ],
            DomainBox::interval(0.0, 2.0).unwrap(),
            true,
        )
        .unwrap()
    }

    #[test]
    fn thirds_step_from_the_endpoints() {
        let ifs = cantor_system();
        let k = Cloud::from_scalars(&[0.0, 1.0], 0.0).unwrap();
        let next = hutchinson_step(&ifs, &k).unwrap();
        let mut xs: Vec<f64> = next.points().iter().map(|p| p.coord(0)).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs.len(), 4);
        assert!((xs[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((xs[2] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn interval_pair_step_collapses_duplicates() {
        let ifs = fg_system();
        let k = Cloud::from_scalars(&[0.0, 2.0], 0.0).unwrap();
        let next = hutchinson_step(&ifs, &k).unwrap();
        let mut xs: Vec<f64> = next.points().iter().map(|p| p.coord(0)).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn cantor_residuals_shrink_by_thirds() {
        let ifs = cantor_system();
        let seed = Cloud::from_scalars(&[0.0, 1.0], 0.0).unwrap();
        let trace =
            attractor_deterministic_with(&ifs, &seed, &Pd::Euclidean, 1e-6, 40, None).unwrap();
        assert!(trace.converged);
        assert!((trace.residuals[0] - 1.0 / 3.0).abs() < 1e-12);
        for w in trace.residuals.windows(2) {
            let ratio = w[1] / w[0];
            assert!((ratio - 1.0 / 3.0).abs() < 0.03, "ratio {ratio}");
        }
    }

    #[test]
    fn escaping_orbit_does_not_converge() {
        let b = 30.0;
        let ifs = IfsSystem::new(
            vec![MapDescriptor::Builtin {
                name: BuiltinName::EdelsteinExp,
                params: vec![b],
            }],
            DomainBox::interval(0.0, b).unwrap(),
            false,
        )
        .unwrap();
        let seed = Cloud::from_scalars(&[0.0], 0.0).unwrap();
        let trace =
            attractor_deterministic_with(&ifs, &seed, &Pd::Euclidean, 1e-9, 30, None).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iterations, 30);
    }

    #[test]
    fn undeclared_escape_is_an_error() {
        let ifs = IfsSystem::new(
            vec![MapDescriptor::Affine {
                matrix: vec![1.0],
                offset: Point::scalar(0.6),
            }],
            DomainBox::interval(0.0, 1.0).unwrap(),
            false,
        )
        .unwrap();
        let k = Cloud::from_scalars(&[0.9], 0.0).unwrap();
        assert!(matches!(
            hutchinson_step(&ifs, &k),
            Err(HutchError::ImageEscapesDomain { map_index: 0, .. })
        ));
    }

    #[test]
    fn chaos_game_is_seed_deterministic_and_stays_in_the_box() {
        let ifs = cantor_system();
        let start = Point::scalar(0.5);
        let a = chaos_game(&ifs, &start, 500, 50, 42).unwrap();
        let b = chaos_game(&ifs, &start, 500, 50, 42).unwrap();
        assert_eq!(a.points(), b.points());
        let c = chaos_game(&ifs, &start, 500, 50, 43).unwrap();
        assert_ne!(a.points(), c.points());
        for p in a.points() {
            assert!(ifs.domain().contains(p, 0.0));
        }
    }

    #[test]
    fn constant_streams_code_map_fixed_points() {
        let ifs = cantor_system();
        let dd = Multimetric::new(vec![Pd::Euclidean], true).unwrap();
        let left = coding_map(&ifs, &SymbolStream::constant(0), &Point::scalar(0.5), &dd, 1e-14, 200)
            .unwrap();
        assert!(left.point.coord(0).abs() < 1e-12);
        let right = coding_map(&ifs, &SymbolStream::constant(1), &Point::scalar(0.5), &dd, 1e-14, 200)
            .unwrap();
        assert!((right.point.coord(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_stream_codes_the_cycle_fixed_point() {
        // alternating thirds maps: limit is the fixed point 1/4 of
        // x -> x/9 + 2/9
        let ifs = cantor_system();
        let dd = Multimetric::new(vec![Pd::Euclidean], true).unwrap();
        let stream = SymbolStream::new(Word::empty(), Word::new(vec![0, 1])).unwrap();
        let coded = coding_map(&ifs, &stream, &Point::scalar(0.7), &dd, 1e-14, 200).unwrap();
        assert!((coded.point.coord(0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn escaping_coding_orbit_reports_no_contraction() {
        let b = 50.0;
        let ifs = IfsSystem::new(
            vec![MapDescriptor::Builtin {
                name: BuiltinName::EdelsteinExp,
                params: vec![b],
            }],
            DomainBox::interval(0.0, b).unwrap(),
            false,
        )
        .unwrap();
        let dd = Multimetric::new(vec![Pd::Euclidean], true).unwrap();
        let r = coding_map(&ifs, &SymbolStream::constant(0), &Point::scalar(0.0), &dd, 1e-12, 50);
        assert!(matches!(r, Err(HutchError::NoContraction { .. })));
    }

    #[test]
    fn word_cover_approaches_the_deterministic_attractor() {
        let ifs = cantor_system();
        let words = attractor_by_words(&ifs, 8, &Point::scalar(0.5), 1 << 16).unwrap();
        let seed = Cloud::from_scalars(&[0.0, 1.0], 0.0).unwrap();
        let det = attractor_deterministic_with(&ifs, &seed, &Pd::Euclidean, 1e-4, 30, None)
            .unwrap()
            .final_cloud;
        let d = hausdorff(&Pd::Euclidean, &words, &det).unwrap();
        assert!(d < 2.0 * libm::pow(1.0 / 3.0, 8.0) + 1e-4, "d = {d}");
    }
}
