//! Remetrization: the sup-weighted pseudometric
//!
//! ```text
//!     d̂(x, y) = sup_n max_{w in F^n} alpha_n d(w(x), w(y))
//! ```
//!
//! with `alpha_0 = 1`, `alpha` strictly increasing and `sup alpha <= 2`
//! (default `alpha_n = 2 - 2^{-n}`), truncated at a depth whose tail is
//! certified below a requested `eps`; and the Banach-power metric
//!
//! ```text
//!     bp(x, y) = sup_n sup_{w in F^n} a^n d(w(x), w(y)),   a > 1,
//! ```
//!
//! which turns an eventually contracting system (all words of length `m`
//! contract by `lambda` with `a^m * lambda < 1`) into a family that
//! contracts every single step by the factor `1/a`.
//!
//! Every evaluation is a finite truncation; the honest error bar is the
//! `tail_bound` carried alongside the value.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::metrics::{pd_eval, Cloud, MetricError, PseudometricDescriptor};
use crate::rng::Rng;
use crate::spaces::{
    analytic_lipschitz, eval_map, IfsSystem, MapDescriptor, Point, SpaceError, Word,
};

/// Closed-form weight sequences for the remetrization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaSequence {
    /// The default `alpha_n = 2 - 2^{-n}`: starts at 1, strictly
    /// increasing, bounded by 2.
    TwoMinusHalfPow,
    /// `alpha_n = 2^{-n} + [n = 0] * 0`: deliberately decreasing and
    /// therefore invalid; only reachable through the unchecked
    /// constructor, for exercising the axiom checker.
    InvalidDecreasing,
}

impl AlphaSequence {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            AlphaSequence::TwoMinusHalfPow => 2.0 - libm::exp2(-(n as f64)),
            AlphaSequence::InvalidDecreasing => libm::exp2(-(n as f64)),
        }
    }

    fn validate(&self) -> Result<(), RemetrizeError> {
        let a0 = self.value(0);
        if a0 != 1.0 {
            return Err(RemetrizeError::InvalidAlphas("alpha_0 must equal 1"));
        }
        // past n = 52 the increments fall below one ulp of 2.0, so
        // strictness is only checkable before saturation
        for n in 0..64 {
            let (a, b) = (self.value(n), self.value(n + 1));
            if n < 48 && !(b > a) {
                return Err(RemetrizeError::InvalidAlphas(
                    "alpha must be strictly increasing",
                ));
            }
            if b < a || b > 2.0 {
                return Err(RemetrizeError::InvalidAlphas(
                    "alpha must stay nondecreasing and at most 2",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RemetrizeError {
    InvalidAlphas(&'static str),
    /// The tail stayed at or above `eps` at the depth cap; carries the
    /// offending word of maximal image diameter.
    TailNotAchievable {
        depth_cap: usize,
        tail: f64,
        offending_word: Word,
    },
    /// Some word of length `m` has no analytic Lipschitz constant under
    /// the base pseudometric.
    NoAnalyticLambda { power: usize },
    /// `a^m * lambda >= 1`: the requested growth rate outruns the
    /// contraction of the `m`-th power.
    NotContracting { a: f64, power: usize, lambda: f64 },
    BudgetExceeded { words: u128, budget: usize },
    EmptyCloud,
    Space(SpaceError),
    Metric(MetricError),
}

impl From<SpaceError> for RemetrizeError {
    fn from(e: SpaceError) -> Self {
        RemetrizeError::Space(e)
    }
}

impl From<MetricError> for RemetrizeError {
    fn from(e: MetricError) -> Self {
        RemetrizeError::Metric(e)
    }
}

impl fmt::Display for RemetrizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RemetrizeError::InvalidAlphas(m) => write!(f, "invalid alpha sequence: {m}"),
            RemetrizeError::TailNotAchievable {
                depth_cap,
                tail,
                offending_word,
            } => write!(
                f,
                "tail bound {tail} not below eps at depth cap {depth_cap}; widest word {offending_word}"
            ),
            RemetrizeError::NoAnalyticLambda { power } => write!(
                f,
                "no analytic Lipschitz constant for some word of length {power}"
            ),
            RemetrizeError::NotContracting { a, power, lambda } => write!(
                f,
                "a^m * lambda = {} >= 1 for a = {a}, m = {power}, lambda = {lambda}",
                libm::pow(*a, *power as f64) * lambda
            ),
            RemetrizeError::BudgetExceeded { words, budget } => {
                write!(f, "word tree of size {words} exceeds budget {budget}")
            }
            RemetrizeError::EmptyCloud => write!(f, "invariant cloud must be non-empty"),
            RemetrizeError::Space(e) => write!(f, "{e}"),
            RemetrizeError::Metric(e) => write!(f, "{e}"),
        }
    }
}

/// A truncated evaluation together with its certified error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhatValue {
    pub value: f64,
    /// Upper bound on the contribution of all depths beyond the
    /// truncation, valid on the hull of the invariant cloud.
    pub error_bar: f64,
}

/// The truncation of `d̂` at a fixed depth with a certified tail bound.
///
/// The tail certificate holds on the convex hull of the invariant cloud;
/// evaluations at arbitrary box points are still well-defined truncations
/// but their error bar is only guaranteed on that hull.
#[derive(Debug, Clone)]
pub struct RemetrizedPseudometric {
    base: PseudometricDescriptor,
    ifs: IfsSystem,
    alphas: AlphaSequence,
    depth: usize,
    invariant_cloud: Cloud,
    tail_bound: f64,
    /// hull images can be used for branch pruning when every map sends
    /// convex hulls into the hull of the image vertices
    hull_safe: bool,
}

impl PartialEq for RemetrizedPseudometric {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.alphas == other.alphas
            && self.depth == other.depth
            && self.tail_bound == other.tail_bound
    }
}

/// Convexity of image hulls holds for affine maps in any dimension and
/// for monotone maps in dimension one; those are the cases where corner
/// images bound whole-box images.
fn hull_safe(ifs: &IfsSystem) -> bool {
    ifs.maps().iter().all(|m| match m {
        MapDescriptor::Affine { .. } => true,
        MapDescriptor::Builtin { .. } => true,
        MapDescriptor::Clamp1D { .. } => ifs.dim() == 1,
        MapDescriptor::WordComposite { .. } => false,
    })
}

fn apply_all(maps_idx: usize, ifs: &IfsSystem, pts: &[Point]) -> Result<Vec<Point>, SpaceError> {
    let m = &ifs.maps()[maps_idx];
    pts.iter().map(|p| eval_map(m, p)).collect()
}

fn spread(d: &PseudometricDescriptor, pts: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let v = pd_eval(d, &pts[i], &pts[j]).unwrap_or(0.0);
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Exact maximum over all words of length `n` of the diameter of the
/// word image of `pts`, with branch-and-bound pruning when corner images
/// legitimately dominate deeper images. Also returns an attaining word.
fn max_word_image_diam(
    ifs: &IfsSystem,
    d: &PseudometricDescriptor,
    n: usize,
    pts: &[Point],
    prune: bool,
) -> Result<(f64, Word), RemetrizeError> {
    struct Frame {
        depth: usize,
        letters: Vec<usize>,
        pts: Vec<Point>,
    }
    let mut best = -1.0f64;
    let mut best_word = Word::empty();
    let mut stack = vec![Frame {
        depth: 0,
        letters: Vec::new(),
        pts: pts.to_vec(),
    }];
    while let Some(fr) = stack.pop() {
        let diam = spread(d, &fr.pts);
        if fr.depth == n {
            if diam > best {
                best = diam;
                best_word = Word::new(fr.letters.clone());
            }
            continue;
        }
        if prune && diam <= best {
            continue; // deeper images cannot widen past the partial hull
        }
        for k in (0..ifs.maps().len()).rev() {
            let imgs = apply_all(k, ifs, &fr.pts)?;
            let mut letters = fr.letters.clone();
            letters.push(k);
            stack.push(Frame {
                depth: fr.depth + 1,
                letters,
                pts: imgs,
            });
        }
    }
    Ok((best.max(0.0), best_word))
}

impl RemetrizedPseudometric {
    pub fn base(&self) -> &PseudometricDescriptor {
        &self.base
    }

    pub fn ifs(&self) -> &IfsSystem {
        &self.ifs
    }

    pub fn alphas(&self) -> AlphaSequence {
        self.alphas
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn invariant_cloud(&self) -> &Cloud {
        &self.invariant_cloud
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Truncated `d̂` with its error bar. Depth-first over the word tree,
    /// pruning subtrees whose corner-image hull already cannot beat the
    /// running maximum.
    pub fn eval(&self, x: &Point, y: &Point) -> RhatValue {
        RhatValue {
            value: self.eval_with_depth(x, y, self.depth),
            error_bar: self.tail_bound,
        }
    }

    /// The same truncation at an explicit depth (used to check depth
    /// monotonicity and tail honesty).
    pub fn eval_with_depth(&self, x: &Point, y: &Point, depth: usize) -> f64 {
        struct Frame {
            depth: usize,
            x: Point,
            y: Point,
            corners: Vec<Point>,
        }
        let corners = self.ifs.domain().corners();
        let mut best = 0.0f64;
        let mut stack = vec![Frame {
            depth: 0,
            x: x.clone(),
            y: y.clone(),
            corners,
        }];
        while let Some(fr) = stack.pop() {
            let v = self.alphas.value(fr.depth)
                * pd_eval(&self.base, &fr.x, &fr.y).expect("validated metric and points");
            if v > best {
                best = v;
            }
            if fr.depth == depth {
                continue;
            }
            if self.hull_safe {
                // every deeper term is at most 2 * diam of this node's
                // corner-image hull
                let bound = 2.0 * spread(&self.base, &fr.corners);
                if bound <= best {
                    continue;
                }
            }
            for k in (0..self.ifs.maps().len()).rev() {
                let m = &self.ifs.maps()[k];
                let fx = eval_map(m, &fr.x).expect("validated map");
                let fy = eval_map(m, &fr.y).expect("validated map");
                let imgs: Vec<Point> = fr
                    .corners
                    .iter()
                    .map(|p| eval_map(m, p).expect("validated map"))
                    .collect();
                stack.push(Frame {
                    depth: fr.depth + 1,
                    x: fx,
                    y: fy,
                    corners: imgs,
                });
            }
        }
        best
    }

    /// Greedy `eps`-net size over a sample cloud under the truncated
    /// `d̂`; a finite net witnesses total boundedness at scale `eps`.
    pub fn epsilon_net_size(&self, sample: &Cloud, eps: f64) -> usize {
        let mut centers: Vec<&Point> = Vec::new();
        for p in sample.points() {
            if centers.iter().all(|c| self.eval(c, p).value > eps) {
                centers.push(p);
            }
        }
        centers.len()
    }
}

/// Builds the truncated `d̂`, choosing the smallest depth `N <= depth_cap`
/// whose certified tail `2 * max_{w in F^N} diam_base(w(K))` falls below
/// `eps` on the invariant cloud `K`.
pub fn build_remetrized(
    ifs: &IfsSystem,
    base: PseudometricDescriptor,
    alphas: AlphaSequence,
    invariant_cloud: Cloud,
    eps: f64,
    depth_cap: usize,
) -> Result<RemetrizedPseudometric, RemetrizeError> {
    alphas.validate()?;
    build_remetrized_unchecked(ifs, base, alphas, invariant_cloud, eps, depth_cap)
}

/// Same as [`build_remetrized`] but skips the alpha-sequence validation;
/// exists so tests can exercise the axiom checker on corrupted weights.
pub fn build_remetrized_unchecked(
    ifs: &IfsSystem,
    base: PseudometricDescriptor,
    alphas: AlphaSequence,
    invariant_cloud: Cloud,
    eps: f64,
    depth_cap: usize,
) -> Result<RemetrizedPseudometric, RemetrizeError> {
    if invariant_cloud.is_empty() {
        return Err(RemetrizeError::EmptyCloud);
    }
    if eps <= 0.0 {
        return Err(RemetrizeError::Metric(MetricError::InvalidParameter(
            "eps must be positive",
        )));
    }
    let prune = hull_safe(ifs);
    let k = invariant_cloud.points();
    let mut last = (f64::INFINITY, Word::empty());
    for depth in 0..=depth_cap {
        let budget_words = (ifs.maps().len() as u128).pow(depth as u32);
        if budget_words > (1u128 << 24) {
            return Err(RemetrizeError::BudgetExceeded {
                words: budget_words,
                budget: 1 << 24,
            });
        }
        let (diam, word) = max_word_image_diam(ifs, &base, depth, k, prune)?;
        let tail = 2.0 * diam;
        if tail < eps {
            return Ok(RemetrizedPseudometric {
                base,
                ifs: ifs.clone(),
                alphas,
                depth,
                invariant_cloud,
                tail_bound: tail,
                hull_safe: prune,
            });
        }
        last = (tail, word);
    }
    Err(RemetrizeError::TailNotAchievable {
        depth_cap,
        tail: last.0,
        offending_word: last.1,
    })
}

/// Convenience: the truncated `d̂` value at a pair of points.
pub fn rhat_eval(rm: &RemetrizedPseudometric, x: &Point, y: &Point) -> RhatValue {
    rm.eval(x, y)
}

/// Wraps the truncation as a pseudometric descriptor.
pub fn remetrized_descriptor(rm: RemetrizedPseudometric) -> PseudometricDescriptor {
    PseudometricDescriptor::Remetrized(Arc::new(rm))
}

/// Outcome of the sampled Edelstein check under `d̂`.
#[derive(Debug, Clone)]
pub struct EdelsteinCheck {
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<EdelsteinViolation>,
}

#[derive(Debug, Clone)]
pub struct EdelsteinViolation {
    pub pair: (Point, Point),
    pub map_index: usize,
    pub before: f64,
    pub after: f64,
}

/// Draws seeded points from the convex hull of the invariant cloud as
/// random convex combinations of its vertices.
fn hull_sample(rm: &RemetrizedPseudometric, rng: &mut Rng) -> Point {
    let pts = rm.invariant_cloud.points();
    let mut weights: Vec<f64> = (0..pts.len()).map(|_| rng.unit_f64() + 1e-9).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let dim = pts[0].dim();
    let coords: Vec<f64> = (0..dim)
        .map(|c| {
            pts.iter()
                .zip(&weights)
                .map(|(p, w)| p.coord(c) * w)
                .sum()
        })
        .collect();
    Point::new(coords).expect("convex combination of finite points")
}

/// Checks `d̂(f(x), f(y)) < d̂(x, y)` on sampled hull pairs, up to the
/// truncation's error bars: pairs closer than the resolution floor are
/// skipped, and a decrease within `2 * tail_bound` is not a violation.
pub fn verify_edelstein_under(
    rm: &RemetrizedPseudometric,
    pair_samples: usize,
    seed: u64,
) -> Result<EdelsteinCheck, RemetrizeError> {
    let mut rng = Rng::new(seed);
    let floor = (4.0 * rm.tail_bound).max(1e-6);
    let mut out = EdelsteinCheck {
        checked: 0,
        skipped: 0,
        violations: Vec::new(),
    };
    for _ in 0..pair_samples {
        let x = hull_sample(rm, &mut rng);
        let y = hull_sample(rm, &mut rng);
        let before = rm.eval(&x, &y).value;
        if before <= floor {
            out.skipped += 1;
            continue;
        }
        out.checked += 1;
        for (mi, m) in rm.ifs.maps().iter().enumerate() {
            let fx = eval_map(m, &x)?;
            let fy = eval_map(m, &y)?;
            let after = rm.eval(&fx, &fy).value;
            if after >= before + 2.0 * rm.tail_bound {
                out.violations.push(EdelsteinViolation {
                    pair: (x.clone(), y.clone()),
                    map_index: mi,
                    before,
                    after,
                });
            }
        }
    }
    Ok(out)
}

/// Outcome of the sampled Krasnoselskii check under `d̂`.
#[derive(Debug, Clone)]
pub struct KrasnoselskiiCheck {
    /// Worst observed `d̂(f(x), f(y)) / d̂(x, y)` over pairs in the window.
    pub sup_ratio: f64,
    pub pairs_used: usize,
    /// Analytic ceiling `lambda = max_{m <= k} alpha_m / alpha_{m+1}`
    /// with `k` chosen so that depth-`k` word images are narrower than a
    /// quarter of the window's lower end.
    pub lambda: f64,
    pub passed: bool,
}

/// Samples hull pairs with `d̂ in [a_low, b_high]` and compares the worst
/// one-step ratio against the analytic ceiling from the alpha weights.
pub fn verify_krasnoselskii_under(
    rm: &RemetrizedPseudometric,
    a_low: f64,
    b_high: f64,
    pair_samples: usize,
    seed: u64,
) -> Result<KrasnoselskiiCheck, RemetrizeError> {
    // find k with 2 * max word-image diameter below a_low / 4
    let mut k = 0usize;
    let corners = rm.ifs.domain().corners();
    let corner_cloud: Vec<Point> = corners;
    loop {
        let (diam, _) =
            max_word_image_diam(&rm.ifs, &rm.base, k, &corner_cloud, rm.hull_safe)?;
        if 2.0 * diam < a_low / 4.0 || k >= rm.depth + 32 {
            break;
        }
        k += 1;
    }
    let mut lambda = 0.0f64;
    for m in 0..=k {
        lambda = lambda.max(rm.alphas.value(m) / rm.alphas.value(m + 1));
    }

    let mut rng = Rng::new(seed);
    let mut sup_ratio = 0.0f64;
    let mut pairs_used = 0usize;
    let mut attempts = 0usize;
    while pairs_used < pair_samples && attempts < pair_samples * 50 {
        attempts += 1;
        let x = hull_sample(rm, &mut rng);
        let y = hull_sample(rm, &mut rng);
        let before = rm.eval(&x, &y).value;
        if before < a_low || before > b_high {
            continue;
        }
        pairs_used += 1;
        for m in rm.ifs.maps() {
            let after = rm.eval(&eval_map(m, &x)?, &eval_map(m, &y)?).value;
            let ratio = after / before;
            if ratio > sup_ratio {
                sup_ratio = ratio;
            }
        }
    }
    Ok(KrasnoselskiiCheck {
        sup_ratio,
        pairs_used,
        lambda,
        passed: pairs_used > 0 && sup_ratio <= lambda,
    })
}

// ---------------------------------------------------------------------------
// Banach-power metric
// ---------------------------------------------------------------------------

/// The metric `bp(x, y) = max_{n <= depth} max_{w in F^n} a^n d(w(x), w(y))`
/// built from an `m`-th-power contraction `lambda` with `a^m * lambda < 1`.
/// Under it, every map of the family contracts by exactly `1/a` up to the
/// geometric truncation error.
#[derive(Debug, Clone)]
pub struct BanachPowerMetric {
    base: PseudometricDescriptor,
    ifs: IfsSystem,
    a: f64,
    power: usize,
    lambda: f64,
    depth: usize,
}

impl PartialEq for BanachPowerMetric {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.a == other.a
            && self.power == other.power
            && self.depth == other.depth
    }
}

impl BanachPowerMetric {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        struct Frame {
            depth: usize,
            x: Point,
            y: Point,
        }
        let mut best = 0.0f64;
        let mut stack = vec![Frame {
            depth: 0,
            x: x.clone(),
            y: y.clone(),
        }];
        while let Some(fr) = stack.pop() {
            let w = libm::pow(self.a, fr.depth as f64);
            let v = w * pd_eval(&self.base, &fr.x, &fr.y).expect("validated metric and points");
            if v > best {
                best = v;
            }
            if fr.depth == self.depth {
                continue;
            }
            for m in self.ifs.maps() {
                stack.push(Frame {
                    depth: fr.depth + 1,
                    x: eval_map(m, &fr.x).expect("validated map"),
                    y: eval_map(m, &fr.y).expect("validated map"),
                });
            }
        }
        best
    }
}

/// Builds the Banach-power metric: computes `lambda` as the analytic
/// family constant of the `m`-th power, requires `a^m * lambda < 1`, and
/// truncates once the geometric envelope `a^n lambda^{floor(n/m)} diam`
/// falls below `1e-9 * diam`.
pub fn build_banach_power(
    ifs: &IfsSystem,
    base: PseudometricDescriptor,
    power: usize,
    a: f64,
    depth_cap: usize,
) -> Result<BanachPowerMetric, RemetrizeError> {
    if a <= 1.0 || power == 0 {
        return Err(RemetrizeError::Metric(MetricError::InvalidParameter(
            "need a > 1 and power >= 1",
        )));
    }
    let words = (ifs.maps().len() as u128).pow(power as u32);
    if words > (1u128 << 20) {
        return Err(RemetrizeError::BudgetExceeded {
            words,
            budget: 1 << 20,
        });
    }
    let powers = ifs.power_maps(power, 1 << 20)?;
    let lambda = powers
        .iter()
        .map(|p| analytic_lipschitz(p, &base))
        .try_fold(0.0f64, |acc, l| l.map(|l| acc.max(l)))
        .ok_or(RemetrizeError::NoAnalyticLambda { power })?;
    if libm::pow(a, power as f64) * lambda >= 1.0 {
        return Err(RemetrizeError::NotContracting { a, power, lambda });
    }
    let depth = banach_power_depth(ifs, &base, power, a, lambda, depth_cap)?;
    Ok(BanachPowerMetric {
        base,
        ifs: ifs.clone(),
        a,
        power,
        lambda,
        depth,
    })
}

/// Skips both the contraction requirement and the analytic-lambda lookup:
/// a deliberately broken construction for negative-control tests.
pub fn build_banach_power_unchecked(
    ifs: &IfsSystem,
    base: PseudometricDescriptor,
    power: usize,
    a: f64,
    lambda: f64,
    depth: usize,
) -> BanachPowerMetric {
    BanachPowerMetric {
        base,
        ifs: ifs.clone(),
        a,
        power,
        lambda,
        depth,
    }
}

fn banach_power_depth(
    ifs: &IfsSystem,
    base: &PseudometricDescriptor,
    power: usize,
    a: f64,
    lambda: f64,
    depth_cap: usize,
) -> Result<usize, RemetrizeError> {
    let corners = ifs.domain().corners();
    let diam = spread(base, &corners).max(1e-300);
    let target = 1e-9 * diam;
    let mut depth = 0usize;
    loop {
        // the envelope past `depth` is sup_{n > depth} a^n lambda^{n/m} diam;
        // since a^m lambda < 1 it is attained within the next m steps
        let mut tail = 0.0f64;
        for n in (depth + 1)..=(depth + power) {
            let env = libm::pow(a, n as f64)
                * libm::pow(lambda, libm::floor(n as f64 / power as f64))
                * diam;
            tail = tail.max(env);
        }
        if tail < target {
            return Ok(depth);
        }
        depth += 1;
        if depth > depth_cap {
            return Err(RemetrizeError::TailNotAchievable {
                depth_cap,
                tail,
                offending_word: Word::empty(),
            });
        }
        let words = (ifs.maps().len() as u128).pow(depth as u32);
        if words > (1u128 << 22) {
            return Err(RemetrizeError::BudgetExceeded {
                words,
                budget: 1 << 22,
            });
        }
    }
}

/// Wraps the Banach-power metric as a pseudometric descriptor.
pub fn banach_power_descriptor(bp: BanachPowerMetric) -> PseudometricDescriptor {
    PseudometricDescriptor::BanachPower(Arc::new(bp))
}

/// Outcome of the sampled one-step contraction check under `bp`.
#[derive(Debug, Clone)]
pub struct BanachCheck {
    pub checked: usize,
    pub max_ratio: f64,
    pub violations: Vec<BanachViolation>,
}

#[derive(Debug, Clone)]
pub struct BanachViolation {
    pub pair: (Point, Point),
    pub map_index: usize,
    pub before: f64,
    pub after: f64,
}

/// Samples pairs uniformly in the domain box and checks the one-step
/// bound `bp(f(x), f(y)) <= bp(x, y) / a` up to truncation slack.
pub fn verify_banach_under(
    bp: &BanachPowerMetric,
    pair_samples: usize,
    seed: u64,
) -> Result<BanachCheck, RemetrizeError> {
    let mut rng = Rng::new(seed);
    let boxref = bp.ifs.domain();
    let dim = boxref.dim();
    let sample = |rng: &mut Rng| -> Point {
        let coords: Vec<f64> = (0..dim)
            .map(|c| {
                let lo = boxref.lo().coord(c);
                let hi = boxref.hi().coord(c);
                lo + rng.unit_f64() * (hi - lo)
            })
            .collect();
        Point::new(coords).expect("finite sample in box")
    };
    let corners = boxref.corners();
    let scale = spread(&bp.base, &corners).max(1e-12);
    let slack = 1e-9 * scale * libm::pow(bp.a, bp.depth as f64 + 1.0);
    let mut out = BanachCheck {
        checked: 0,
        max_ratio: 0.0,
        violations: Vec::new(),
    };
    for _ in 0..pair_samples {
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        let before = bp.eval(&x, &y);
        if before <= 1e-9 * scale {
            continue;
        }
        out.checked += 1;
        for (mi, m) in bp.ifs.maps().iter().enumerate() {
            let after = bp.eval(&eval_map(m, &x)?, &eval_map(m, &y)?);
            let ratio = after / before;
            if ratio > out.max_ratio {
                out.max_ratio = ratio;
            }
            if after > before / bp.a + slack {
                out.violations.push(BanachViolation {
                    pair: (x.clone(), y.clone()),
                    map_index: mi,
                    before,
                    after,
                });
            }
        }
    }
    Ok(out)
}

/// Reports a human-readable description of what the truncation certifies.
pub fn tail_summary(rm: &RemetrizedPseudometric) -> String {
    use alloc::format;
    format!(
        "depth {} truncation, tail bound {} on the invariant-cloud hull",
        rm.depth, rm.tail_bound
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::PseudometricDescriptor as Pd;
    use crate::spaces::{DomainBox, Point};
    use alloc::vec;

    fn sierpinski() -> (IfsSystem, Cloud) {
        let p = |x: f64, y: f64| Point::new(vec![x, y]).unwrap();
        let ifs = IfsSystem::new(
            vec![
                MapDescriptor::scaling(2, 0.5, &[0.0, 0.0]),
                MapDescriptor::scaling(2, 0.5, &[1.0, 0.0]),
                MapDescriptor::scaling(2, 0.5, &[0.0, 1.0]),
            ],
            DomainBox::new(p(0.0, 0.0), p(1.0, 1.0)).unwrap(),
            true,
        )
        .unwrap();
        let k = Cloud::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)], 0.0).unwrap();
        (ifs, k)
    }

    fn cantor() -> (IfsSystem, Cloud) {
        let ifs = IfsSystem::new(
            vec![
                MapDescriptor::scaling(1, 1.0 / 3.0, &[0.0]),
                MapDescriptor::scaling(1, 1.0 / 3.0, &[1.0]),
            ],
            DomainBox::interval(0.0, 1.0).unwrap(),
            true,
        )
        .unwrap();
        let k = Cloud::from_scalars(&[0.0, 1.0], 0.0).unwrap();
        (ifs, k)
    }

    fn swap_halve() -> IfsSystem {
        let p = |x: f64, y: f64| Point::new(vec![x, y]).unwrap();
        IfsSystem::new(
            vec![MapDescriptor::Affine {
                matrix: vec![0.0, 1.0, 0.5, 0.0],
                offset: p(0.0, 0.0),
            }],
            DomainBox::new(p(-1.0, -1.0), p(1.0, 1.0)).unwrap(),
            true,
        )
        .unwrap()
    }

    #[test]
    fn default_alphas_start_at_one_and_stay_below_two() {
        let a = AlphaSequence::TwoMinusHalfPow;
        assert!(a.validate().is_ok());
        assert_eq!(a.value(0), 1.0);
        assert!(a.value(40) < 2.0 && a.value(40) > a.value(39));
        assert!(AlphaSequence::InvalidDecreasing.validate().is_err());
    }

    #[test]
    fn half_scalings_pick_the_predicted_truncation_depth() {
        let (ifs, k) = sierpinski();
        let rm = build_remetrized(
            &ifs,
            Pd::Euclidean,
            AlphaSequence::TwoMinusHalfPow,
            k,
            1e-3,
            32,
        )
        .unwrap();
        // first depth with 2 * 2^{-N} * sqrt(2) below 1e-3
        assert_eq!(rm.depth(), 12);
        assert!(rm.tail_bound() < 1e-3);
        assert!(rm.tail_bound() > 2e-4);
    }

    #[test]
    fn truncated_value_brackets_the_base_distance() {
        let (ifs, k) = sierpinski();
        let rm = build_remetrized(
            &ifs,
            Pd::Euclidean,
            AlphaSequence::TwoMinusHalfPow,
            k,
            1e-2,
            32,
        )
        .unwrap();
        let x = Point::new(vec![0.0, 0.0]).unwrap();
        let y = Point::new(vec![1.0, 0.0]).unwrap();
        let v = rm.eval(&x, &y);
        let base = 1.0;
        assert!(v.value >= base);
        assert!(v.value <= 2.0 * libm::sqrt(2.0) + 1e-2);
        assert_eq!(v.error_bar, rm.tail_bound());
    }

    #[test]
    fn value_is_monotone_in_depth_and_tail_is_honest() {
        let (ifs, k) = cantor();
        let rm = build_remetrized(
            &ifs,
            Pd::Euclidean,
            AlphaSequence::TwoMinusHalfPow,
            k,
            1e-4,
            40,
        )
        .unwrap();
        let mut rng = Rng::new(11);
        for _ in 0..40 {
            let x = Point::scalar(rng.unit_f64());
            let y = Point::scalar(rng.unit_f64());
            let mut prev = 0.0;
            for d in 0..rm.depth() {
                let v = rm.eval_with_depth(&x, &y, d);
                assert!(v >= prev - 1e-15);
                prev = v;
            }
            let full = rm.eval(&x, &y).value;
            let deeper = rm.eval_with_depth(&x, &y, rm.depth() + 6);
            assert!(deeper - full <= rm.tail_bound() + 1e-15);
        }
    }

    #[test]
    fn tail_failure_names_a_wide_word() {
        // the interval pair keeps unit-length word images forever
        let ifs = IfsSystem::new(
            vec![
                MapDescriptor::Clamp1D { slope: 1.0, shift: -1.0, lo: 0.0, hi: 2.0 },
                MapDescriptor::Clamp1D { slope: 1.0, shift: 1.0, lo: 0.0, hi: 2.0 },
            ],
            DomainBox::interval(0.0, 2.0).unwrap(),
            true,
        )
        .unwrap();
        let k = Cloud::from_scalars(&[0.0, 2.0], 0.0).unwrap();
        let err = build_remetrized(
            &ifs,
            Pd::Euclidean,
            AlphaSequence::TwoMinusHalfPow,
            k,
            1e-3,
            10,
        );
        match err {
            Err(RemetrizeError::TailNotAchievable { tail, offending_word, .. }) => {
                assert!(tail >= 2.0 - 1e-12);
                assert_eq!(offending_word.len(), 10);
            }
            other => panic!("expected tail failure, got {other:?}"),
        }
    }

    #[test]
    fn edelstein_check_is_clean_for_half_scalings() {
        let (ifs, k) = sierpinski();
        let rm = build_remetrized(
            &ifs,
            Pd::Euclidean,
            AlphaSequence::TwoMinusHalfPow,
            k,
            1e-3,
            32,
        )
        .unwrap();
        let check = verify_edelstein_under(&rm, 200, 7).unwrap();
        assert!(check.checked > 100);
        assert!(check.violations.is_empty());
    }

    #[test]
    fn krasnoselskii_ratio_stays_below_the_alpha_ceiling() {
        let (ifs, k) = sierpinski();
        let rm = build_remetrized(
            &ifs,
            Pd::Euclidean,
            AlphaSequence::TwoMinusHalfPow,
            k,
            1e-3,
            32,
        )
        .unwrap();
        let check = verify_krasnoselskii_under(&rm, 0.01, 3.0, 200, 13).unwrap();
        assert!(check.pairs_used > 100);
        assert!(check.lambda < 1.0);
        assert!(check.sup_ratio < 1.0, "sup ratio {}", check.sup_ratio);
        assert!(check.passed, "{} vs {}", check.sup_ratio, check.lambda);
    }

    #[test]
    fn banach_power_contracts_by_exactly_the_rate() {
        let ifs = swap_halve();
        let bp = build_banach_power(&ifs, Pd::SupNorm, 2, 1.2, 256).unwrap();
        assert!((bp.lambda() - 0.5).abs() < 1e-12);
        let check = verify_banach_under(&bp, 200, 5).unwrap();
        assert!(check.checked > 150);
        assert!(check.violations.is_empty(), "violations {:?}", check.violations.len());
        assert!(check.max_ratio <= 1.0 / 1.2 + 1e-6, "ratio {}", check.max_ratio);
    }

    #[test]
    fn overdriven_rate_is_rejected_and_fails_verification() {
        let ifs = swap_halve();
        // 1.5^2 * 0.5 > 1: the build must refuse
        match build_banach_power(&ifs, Pd::SupNorm, 2, 1.5, 256) {
            Err(RemetrizeError::NotContracting { a, power, lambda }) => {
                assert_eq!((a, power), (1.5, 2));
                assert!((lambda - 0.5).abs() < 1e-12);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        // forcing the construction produces observable violations
        let forced = build_banach_power_unchecked(&ifs, Pd::SupNorm, 2, 1.5, 0.5, 12);
        let check = verify_banach_under(&forced, 200, 5).unwrap();
        assert!(!check.violations.is_empty());
    }

    #[test]
    fn epsilon_net_is_small_for_a_contractive_system() {
        let (ifs, k) = cantor();
        let rm = build_remetrized(
            &ifs,
            Pd::Euclidean,
            AlphaSequence::TwoMinusHalfPow,
            k,
            1e-3,
            40,
        )
        .unwrap();
        let sample = Cloud::new(ifs.domain().grid(64), 0.0).unwrap();
        let n = rm.epsilon_net_size(&sample, 0.5);
        assert!(n >= 2 && n <= 16, "net size {n}");
    }
}
