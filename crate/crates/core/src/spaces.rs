//! Points, maps, words and function systems.
//!
//! A function system is a finite list of continuous self-maps of a boxed
//! region of `R^k`. Words index finite compositions of the system's maps;
//! the empty word is the identity.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::metrics::PseudometricDescriptor;

/// Immutable finite-dimensional point with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, SpaceError> {
        if coords.is_empty() {
            return Err(SpaceError::EmptyPoint);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(SpaceError::NonFiniteCoordinate);
        }
        Ok(Point { coords })
    }

    /// 1-dimensional point.
    pub fn scalar(x: f64) -> Self {
        Point::new(vec![x]).expect("finite scalar")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.coords[i]
    }
}

/// Axis-aligned bounding box standing in for the working compact set.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    lo: Point,
    hi: Point,
}

impl DomainBox {
    pub fn new(lo: Point, hi: Point) -> Result<Self, SpaceError> {
        if lo.dim() != hi.dim() {
            return Err(SpaceError::DimMismatch {
                expected: lo.dim(),
                got: hi.dim(),
            });
        }
        if lo
            .coords()
            .iter()
            .zip(hi.coords())
            .any(|(l, h)| l > h)
        {
            return Err(SpaceError::InvalidBox);
        }
        Ok(DomainBox { lo, hi })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self, SpaceError> {
        DomainBox::new(Point::scalar(lo), Point::scalar(hi))
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn lo(&self) -> &Point {
        &self.lo
    }

    pub fn hi(&self) -> &Point {
        &self.hi
    }

    pub fn contains(&self, p: &Point, slack: f64) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .zip(self.lo.coords().iter().zip(self.hi.coords()))
                .all(|(x, (l, h))| *x >= l - slack && *x <= h + slack)
    }

    /// Euclidean diagonal length.
    pub fn diagonal(&self) -> f64 {
        let s: f64 = self
            .lo
            .coords()
            .iter()
            .zip(self.hi.coords())
            .map(|(l, h)| (h - l) * (h - l))
            .sum();
        libm::sqrt(s)
    }

    /// The `2^dim` corner points.
    pub fn corners(&self) -> Vec<Point> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(1 << dim);
        for mask in 0u64..(1 << dim) {
            let coords: Vec<f64> = (0..dim)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        self.hi.coord(i)
                    } else {
                        self.lo.coord(i)
                    }
                })
                .collect();
            out.push(Point::new(coords).expect("box corners are finite"));
        }
        out
    }

    /// Regular grid with `per_axis` samples along each axis.
    pub fn grid(&self, per_axis: usize) -> Vec<Point> {
        assert!(per_axis >= 2);
        let dim = self.dim();
        let total = per_axis.pow(dim as u32);
        let mut out = Vec::with_capacity(total);
        for idx in 0..total {
            let mut rest = idx;
            let coords: Vec<f64> = (0..dim)
                .map(|i| {
                    let k = rest % per_axis;
                    rest /= per_axis;
                    let t = k as f64 / (per_axis - 1) as f64;
                    self.lo.coord(i) + t * (self.hi.coord(i) - self.lo.coord(i))
                })
                .collect();
            out.push(Point::new(coords).expect("grid points are finite"));
        }
        out
    }
}

/// Registered builtin maps with analytic knowledge attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinName {
    /// `f(x) = x + e^{-x}` on a declared interval `[0, b]`; the single
    /// parameter is `b`. Edelstein contracting but with unbounded orbits
    /// on the half-line.
    EdelsteinExp,
    /// `x -> x/2` per coordinate, any dimension.
    Halving,
}

impl BuiltinName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BuiltinName::EdelsteinExp => "edelstein_exp",
            BuiltinName::Halving => "halving",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "edelstein_exp" => Some(BuiltinName::EdelsteinExp),
            "halving" => Some(BuiltinName::Halving),
            _ => None,
        }
    }
}

/// A continuous self-map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapDescriptor {
    /// `x -> M x + offset`, `matrix` row-major `dim x dim`.
    Affine { matrix: Vec<f64>, offset: Point },
    /// `x -> min(hi, max(lo, slope * x + shift))` on the line.
    Clamp1D {
        slope: f64,
        shift: f64,
        lo: f64,
        hi: f64,
    },
    Builtin {
        name: BuiltinName,
        params: Vec<f64>,
    },
    /// The composition `f_{w_0} .. f_{w_{n-1}}` over an explicit base
    /// family; used to talk about powers `F^m` as single maps.
    WordComposite {
        base: Vec<MapDescriptor>,
        word: Word,
    },
}

impl MapDescriptor {
    /// Uniform scaling by `factor` about `center` in `dim` dimensions.
    pub fn scaling(dim: usize, factor: f64, center: &[f64]) -> Self {
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = factor;
        }
        let offset: Vec<f64> = center.iter().map(|c| c * (1.0 - factor)).collect();
        MapDescriptor::Affine {
            matrix,
            offset: Point::new(offset).expect("finite offset"),
        }
    }

    /// `None` means the map is dimension-agnostic.
    pub fn map_dim(&self) -> Option<usize> {
        match self {
            MapDescriptor::Affine { offset, .. } => Some(offset.dim()),
            MapDescriptor::Clamp1D { .. } => Some(1),
            MapDescriptor::Builtin {
                name: BuiltinName::EdelsteinExp,
                ..
            } => Some(1),
            MapDescriptor::Builtin {
                name: BuiltinName::Halving,
                ..
            } => None,
            MapDescriptor::WordComposite { base, word } => word
                .letters()
                .iter()
                .filter_map(|&i| base.get(i).and_then(|m| m.map_dim()))
                .next(),
        }
    }

    fn validate(&self, dim: usize) -> Result<(), SpaceError> {
        match self {
            MapDescriptor::Affine { matrix, offset } => {
                if offset.dim() != dim || matrix.len() != dim * dim {
                    return Err(SpaceError::DimMismatch {
                        expected: dim,
                        got: offset.dim(),
                    });
                }
                if matrix.iter().any(|c| !c.is_finite()) {
                    return Err(SpaceError::NonFiniteCoordinate);
                }
            }
            MapDescriptor::Clamp1D { slope, shift, lo, hi } => {
                if dim != 1 {
                    return Err(SpaceError::DimMismatch { expected: 1, got: dim });
                }
                if !slope.is_finite() || !shift.is_finite() || !lo.is_finite() || !hi.is_finite() {
                    return Err(SpaceError::NonFiniteCoordinate);
                }
                if lo > hi {
                    return Err(SpaceError::InvalidBox);
                }
            }
            MapDescriptor::Builtin { name, params } => match name {
                BuiltinName::EdelsteinExp => {
                    if dim != 1 {
                        return Err(SpaceError::DimMismatch { expected: 1, got: dim });
                    }
                    if params.len() != 1 || !params[0].is_finite() || params[0] <= 0.0 {
                        return Err(SpaceError::BadBuiltinParams(name.as_str()));
                    }
                }
                BuiltinName::Halving => {
                    if !params.is_empty() {
                        return Err(SpaceError::BadBuiltinParams(name.as_str()));
                    }
                }
            },
            MapDescriptor::WordComposite { base, word } => {
                for &i in word.letters() {
                    if i >= base.len() {
                        return Err(SpaceError::WordIndexOutOfRange {
                            index: i,
                            maps: base.len(),
                        });
                    }
                }
                for m in base {
                    m.validate(dim)?;
                }
            }
        }
        Ok(())
    }
}

/// Finite composition `f_{w_0} o f_{w_1} o .. o f_{w_{n-1}}` by map index;
/// the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<usize>,
}

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation: `self` applied after `other` (i.e. `self o other`).
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// `w` repeated `n` times.
    pub fn repeat(&self, n: usize) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() * n);
        for _ in 0..n {
            letters.extend_from_slice(&self.letters);
        }
        Word { letters }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

/// A function system `F` on a boxed domain.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSystem {
    dim: usize,
    maps: Vec<MapDescriptor>,
    domain: DomainBox,
    self_mapping_declared: bool,
}

impl IfsSystem {
    /// Builds and validates a system. With `self_mapping_declared` the
    /// maps are spot-checked on a fixed grid to stay inside the box.
    pub fn new(
        maps: Vec<MapDescriptor>,
        domain: DomainBox,
        self_mapping_declared: bool,
    ) -> Result<Self, SpaceError> {
        let dim = domain.dim();
        if maps.is_empty() {
            return Err(SpaceError::EmptySystem);
        }
        for m in &maps {
            m.validate(dim)?;
        }
        let sys = IfsSystem {
            dim,
            maps,
            domain,
            self_mapping_declared,
        };
        if self_mapping_declared {
            let per_axis = if sys.dim <= 3 { 5 } else { 2 };
            for p in sys.domain.grid(per_axis) {
                for (i, m) in sys.maps.iter().enumerate() {
                    let img = eval_map(m, &p)?;
                    if !sys.domain.contains(&img, 1e-9) {
                        return Err(SpaceError::NotSelfMapping { map: i });
                    }
                }
            }
        }
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maps(&self) -> &[MapDescriptor] {
        &self.maps
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn self_mapping_declared(&self) -> bool {
        self.self_mapping_declared
    }

    /// `F^n` packaged as explicit composite maps (one per word of length `n`).
    pub fn power_maps(&self, n: usize, budget: usize) -> Result<Vec<MapDescriptor>, SpaceError> {
        Ok(enumerate_words(self, n, budget)?
            .into_iter()
            .map(|word| MapDescriptor::WordComposite {
                base: self.maps.clone(),
                word,
            })
            .collect())
    }
}

/// Errors from construction and evaluation in this module.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceError {
    EmptyPoint,
    NonFiniteCoordinate,
    InvalidBox,
    EmptySystem,
    DimMismatch { expected: usize, got: usize },
    BadBuiltinParams(&'static str),
    WordIndexOutOfRange { index: usize, maps: usize },
    WordBudgetExceeded { required: u128, budget: usize },
    NotSelfMapping { map: usize },
    UnregisteredBuiltin(String),
}

impl fmt::Display for SpaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceError::EmptyPoint => write!(f, "points must have at least one coordinate"),
            SpaceError::NonFiniteCoordinate => write!(f, "coordinates must be finite"),
            SpaceError::InvalidBox => write!(f, "box lower corner must not exceed upper corner"),
            SpaceError::EmptySystem => write!(f, "function system needs at least one map"),
            SpaceError::DimMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            SpaceError::BadBuiltinParams(name) => {
                write!(f, "invalid parameters for builtin `{name}`")
            }
            SpaceError::WordIndexOutOfRange { index, maps } => {
                write!(f, "word letter {index} out of range for {maps} maps")
            }
            SpaceError::WordBudgetExceeded { required, budget } => {
                write!(f, "word enumeration needs {required} words, budget is {budget}")
            }
            SpaceError::NotSelfMapping { map } => {
                write!(f, "map {map} leaves the declared domain box")
            }
            SpaceError::UnregisteredBuiltin(name) => {
                write!(f, "unregistered builtin `{name}`")
            }
        }
    }
}

/// Exact image `f(x)`.
pub fn eval_map(map: &MapDescriptor, x: &Point) -> Result<Point, SpaceError> {
    if let Some(d) = map.map_dim() {
        if d != x.dim() {
            return Err(SpaceError::DimMismatch {
                expected: d,
                got: x.dim(),
            });
        }
    }
    match map {
        MapDescriptor::Affine { matrix, offset } => {
            let dim = offset.dim();
            let mut out = Vec::with_capacity(dim);
            for i in 0..dim {
                let mut acc = offset.coord(i);
                for j in 0..dim {
                    acc += matrix[i * dim + j] * x.coord(j);
                }
                out.push(acc);
            }
            Point::new(out)
        }
        MapDescriptor::Clamp1D { slope, shift, lo, hi } => {
            let v = slope * x.coord(0) + shift;
            Point::new(vec![v.max(*lo).min(*hi)])
        }
        MapDescriptor::Builtin { name, .. } => match name {
            BuiltinName::EdelsteinExp => {
                let t = x.coord(0);
                Point::new(vec![t + libm::exp(-t)])
            }
            BuiltinName::Halving => {
                Point::new(x.coords().iter().map(|c| c / 2.0).collect())
            }
        },
        MapDescriptor::WordComposite { base, word } => {
            let mut p = x.clone();
            for &i in word.letters().iter().rev() {
                let m = base
                    .get(i)
                    .ok_or(SpaceError::WordIndexOutOfRange { index: i, maps: base.len() })?;
                p = eval_map(m, &p)?;
            }
            Ok(p)
        }
    }
}

/// `f_{w_0} o .. o f_{w_{n-1}}(x)`; the empty word returns `x`.
pub fn eval_word(ifs: &IfsSystem, w: &Word, x: &Point) -> Result<Point, SpaceError> {
    let mut p = x.clone();
    for &i in w.letters().iter().rev() {
        let m = ifs
            .maps
            .get(i)
            .ok_or(SpaceError::WordIndexOutOfRange { index: i, maps: ifs.maps.len() })?;
        p = eval_map(m, &p)?;
    }
    Ok(p)
}

/// All `|F|^n` words of length `n`, lexicographic by letters.
pub fn enumerate_words(ifs: &IfsSystem, n: usize, budget: usize) -> Result<Vec<Word>, SpaceError> {
    let k = ifs.maps.len() as u128;
    let required = k.checked_pow(n as u32).unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(SpaceError::WordBudgetExceeded { required, budget });
    }
    let total = required as usize;
    let mut out = Vec::with_capacity(total);
    let mut letters = vec![0usize; n];
    loop {
        out.push(Word::new(letters.clone()));
        // lexicographic increment, most significant letter first
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            letters[i] += 1;
            if letters[i] < ifs.maps.len() {
                break;
            }
            letters[i] = 0;
        }
    }
}

/// Collapses a composition of affine maps into a single affine map.
/// Returns `None` if any factor is not affine (builtin `halving` counts
/// as affine at the given dimension).
pub fn collapse_affine(maps: &[&MapDescriptor], dim: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    // identity
    let mut matrix = vec![0.0; dim * dim];
    for i in 0..dim {
        matrix[i * dim + i] = 1.0;
    }
    let mut offset = vec![0.0; dim];
    // maps apply right-to-left: result = m0 o m1 o ..; fold from the right
    for m in maps.iter().rev() {
        let (a, b) = affine_form(m, dim)?;
        // new = A * old, offset = A*old_off + b
        let mut nm = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = 0.0;
                for k in 0..dim {
                    acc += a[i * dim + k] * matrix[k * dim + j];
                }
                nm[i * dim + j] = acc;
            }
        }
        let mut no = vec![0.0; dim];
        for i in 0..dim {
            let mut acc = b[i];
            for k in 0..dim {
                acc += a[i * dim + k] * offset[k];
            }
            no[i] = acc;
        }
        matrix = nm;
        offset = no;
    }
    Some((matrix, offset))
}

fn affine_form(m: &MapDescriptor, dim: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    match m {
        MapDescriptor::Affine { matrix, offset } if offset.dim() == dim => {
            Some((matrix.clone(), offset.coords().to_vec()))
        }
        MapDescriptor::Builtin {
            name: BuiltinName::Halving,
            ..
        } => {
            let mut a = vec![0.0; dim * dim];
            for i in 0..dim {
                a[i * dim + i] = 0.5;
            }
            Some((a, vec![0.0; dim]))
        }
        MapDescriptor::WordComposite { base, word } => {
            let factors: Vec<&MapDescriptor> =
                word.letters().iter().map(|&i| &base[i]).collect();
            collapse_affine(&factors, dim)
        }
        _ => None,
    }
}

/// Operator 2-norm of a row-major `dim x dim` matrix via power iteration
/// on `A^T A`.
pub fn spectral_norm(matrix: &[f64], dim: usize) -> f64 {
    debug_assert_eq!(matrix.len(), dim * dim);
    // B = A^T A
    let mut b = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = 0.0;
            for k in 0..dim {
                acc += matrix[k * dim + i] * matrix[k * dim + j];
            }
            b[i * dim + j] = acc;
        }
    }
    let mut v = vec![1.0; dim];
    // deterministic de-symmetrizing perturbation
    for (i, x) in v.iter_mut().enumerate() {
        *x += (i as f64 + 1.0) * 1e-3;
    }
    let mut lambda = 0.0;
    for _ in 0..200 {
        let mut w = vec![0.0; dim];
        for i in 0..dim {
            for j in 0..dim {
                w[i] += b[i * dim + j] * v[j];
            }
        }
        let norm = libm::sqrt(w.iter().map(|x| x * x).sum::<f64>());
        if norm == 0.0 {
            return 0.0;
        }
        for x in w.iter_mut() {
            *x /= norm;
        }
        lambda = norm;
        v = w;
    }
    libm::sqrt(lambda)
}

/// Smallest Lipschitz constant of `map` under `metric` when the pair is
/// analytically supported; `None` otherwise (absence is a value).
pub fn analytic_lipschitz(map: &MapDescriptor, metric: &PseudometricDescriptor) -> Option<f64> {
    use PseudometricDescriptor as Pd;
    match map {
        MapDescriptor::Affine { matrix, offset } => {
            let dim = offset.dim();
            match metric {
                Pd::Euclidean => Some(spectral_norm(matrix, dim)),
                Pd::SupNorm => {
                    // operator infinity-norm: max absolute row sum
                    Some(
                        (0..dim)
                            .map(|i| {
                                (0..dim).map(|j| libm::fabs(matrix[i * dim + j])).sum::<f64>()
                            })
                            .fold(0.0, f64::max),
                    )
                }
                Pd::Coordinate(k) => {
                    // exact only when row k touches no other coordinate
                    if *k >= dim {
                        return None;
                    }
                    let row_ok = (0..dim)
                        .all(|j| j == *k || matrix[k * dim + j] == 0.0);
                    row_ok.then(|| libm::fabs(matrix[k * dim + *k]))
                }
                Pd::MaxOf(members) => {
                    // exact for diagonal matrices, where each member ratio
                    // is attained on its own coordinate
                    let diagonal = (0..dim)
                        .all(|i| (0..dim).all(|j| i == j || matrix[i * dim + j] == 0.0));
                    if !diagonal {
                        return None;
                    }
                    members
                        .iter()
                        .map(|m| analytic_lipschitz(map, m))
                        .try_fold(0.0f64, |acc, l| l.map(|l| acc.max(l)))
                }
                _ => None,
            }
        }
        MapDescriptor::Clamp1D { slope, .. } => match metric {
            Pd::Euclidean | Pd::SupNorm | Pd::Coordinate(0) => Some(libm::fabs(*slope)),
            _ => None,
        },
        MapDescriptor::Builtin { name, params } => match name {
            BuiltinName::EdelsteinExp => {
                // sup of f'(x) = 1 - e^{-x} on the declared interval [0, b]
                let b = *params.first()?;
                match metric {
                    Pd::Euclidean | Pd::SupNorm | Pd::Coordinate(0) => {
                        Some(1.0 - libm::exp(-b))
                    }
                    _ => None,
                }
            }
            BuiltinName::Halving => match metric {
                // all shipped metric kinds are absolutely homogeneous, so
                // uniform halving halves distances exactly
                Pd::Euclidean
                | Pd::SupNorm
                | Pd::Coordinate(_)
                | Pd::WeightedMax(_) => Some(0.5),
                Pd::MaxOf(members) => members
                    .iter()
                    .map(|m| analytic_lipschitz(map, m))
                    .try_fold(0.0f64, |acc, l| l.map(|l| acc.max(l))),
                _ => None,
            },
        },
        MapDescriptor::WordComposite { base, word } => {
            if word.is_empty() {
                return Some(1.0);
            }
            let dim = map.map_dim()?;
            let factors: Vec<&MapDescriptor> =
                word.letters().iter().map(|&i| base.get(i)).collect::<Option<_>>()?;
            let (matrix, offset) = collapse_affine(&factors, dim)?;
            analytic_lipschitz(
                &MapDescriptor::Affine {
                    matrix,
                    offset: Point::new(offset).ok()?,
                },
                metric,
            )
        }
    }
}
