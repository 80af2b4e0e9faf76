//! JSON config schema mirroring the core domain types one-to-one, so
//! that corpus entries round-trip through `corpus export`.

use anyhow::{anyhow, bail, Context, Result};
use hutchfrac_core::corpus::CorpusEntry;
use hutchfrac_core::{
    Cloud, DomainBox, IfsSystem, MapDescriptor, Multimetric, Point, PseudometricDescriptor, Word,
};
use hutchfrac_core::spaces::BuiltinName;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigFile {
    pub dim: usize,
    pub domain: DomainSpec,
    pub maps: Vec<MapSpec>,
    pub metrics: Vec<MetricSpec>,
    pub options: Options,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DomainSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapSpec {
    Affine {
        matrix: Vec<f64>,
        offset: Vec<f64>,
    },
    Clamp1d {
        slope: f64,
        shift: f64,
        lo: f64,
        hi: f64,
    },
    Builtin {
        name: String,
        params: Vec<f64>,
    },
    WordComposite {
        base: Vec<MapSpec>,
        word: Vec<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MetricSpec {
    Euclidean,
    SupNorm,
    Coordinate { index: usize },
    WeightedMax { terms: Vec<(usize, f64)> },
    MaxOf { members: Vec<MetricSpec> },
    HausdorffLift { base: Box<MetricSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub self_mapping: bool,
    pub separates_points: bool,
    pub dedup_tol: f64,
    pub seed_cloud: Vec<Vec<f64>>,
    pub invariant_cloud: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Everything a subcommand needs, validated against the core types.
pub struct LoadedConfig {
    pub system: IfsSystem,
    pub multimetric: Multimetric,
    pub seed_cloud: Cloud,
    pub invariant_cloud: Cloud,
    pub name: Option<String>,
}

fn point(coords: &[f64]) -> Result<Point> {
    Point::new(coords.to_vec()).map_err(|e| anyhow!("bad point: {e}"))
}

fn map_from_spec(spec: &MapSpec) -> Result<MapDescriptor> {
    Ok(match spec {
        MapSpec::Affine { matrix, offset } => MapDescriptor::Affine {
            matrix: matrix.clone(),
            offset: point(offset)?,
        },
        MapSpec::Clamp1d {
            slope,
            shift,
            lo,
            hi,
        } => MapDescriptor::Clamp1D {
            slope: *slope,
            shift: *shift,
            lo: *lo,
            hi: *hi,
        },
        MapSpec::Builtin { name, params } => MapDescriptor::Builtin {
            name: BuiltinName::parse(name)
                .ok_or_else(|| anyhow!("unknown builtin map '{name}'"))?,
            params: params.clone(),
        },
        MapSpec::WordComposite { base, word } => MapDescriptor::WordComposite {
            base: base.iter().map(map_from_spec).collect::<Result<_>>()?,
            word: Word::new(word.clone()),
        },
    })
}

fn map_to_spec(m: &MapDescriptor) -> MapSpec {
    match m {
        MapDescriptor::Affine { matrix, offset } => MapSpec::Affine {
            matrix: matrix.clone(),
            offset: offset.coords().to_vec(),
        },
        MapDescriptor::Clamp1D {
            slope,
            shift,
            lo,
            hi,
        } => MapSpec::Clamp1d {
            slope: *slope,
            shift: *shift,
            lo: *lo,
            hi: *hi,
        },
        MapDescriptor::Builtin { name, params } => MapSpec::Builtin {
            name: name.as_str().to_string(),
            params: params.clone(),
        },
        MapDescriptor::WordComposite { base, word } => MapSpec::WordComposite {
            base: base.iter().map(map_to_spec).collect(),
            word: word.letters().to_vec(),
        },
    }
}

fn metric_from_spec(spec: &MetricSpec) -> Result<PseudometricDescriptor> {
    Ok(match spec {
        MetricSpec::Euclidean => PseudometricDescriptor::Euclidean,
        MetricSpec::SupNorm => PseudometricDescriptor::SupNorm,
        MetricSpec::Coordinate { index } => PseudometricDescriptor::Coordinate(*index),
        MetricSpec::WeightedMax { terms } => PseudometricDescriptor::WeightedMax(terms.clone()),
        MetricSpec::MaxOf { members } => PseudometricDescriptor::MaxOf(
            members.iter().map(metric_from_spec).collect::<Result<_>>()?,
        ),
        MetricSpec::HausdorffLift { base } => {
            PseudometricDescriptor::HausdorffLift(Box::new(metric_from_spec(base)?))
        }
    })
}

/// Inverse of [`metric_from_spec`]; runtime-only descriptors
/// (remetrized / Banach-power handles) have no config form.
pub fn metric_to_spec(d: &PseudometricDescriptor) -> Result<MetricSpec> {
    Ok(match d {
        PseudometricDescriptor::Euclidean => MetricSpec::Euclidean,
        PseudometricDescriptor::SupNorm => MetricSpec::SupNorm,
        PseudometricDescriptor::Coordinate(i) => MetricSpec::Coordinate { index: *i },
        PseudometricDescriptor::WeightedMax(terms) => MetricSpec::WeightedMax {
            terms: terms.clone(),
        },
        PseudometricDescriptor::MaxOf(members) => MetricSpec::MaxOf {
            members: members.iter().map(metric_to_spec).collect::<Result<_>>()?,
        },
        PseudometricDescriptor::HausdorffLift(base) => MetricSpec::HausdorffLift {
            base: Box::new(metric_to_spec(base)?),
        },
        other => bail!("metric {other:?} has no config representation"),
    })
}

fn cloud_from_rows(rows: &[Vec<f64>], dedup_tol: f64, what: &str) -> Result<Cloud> {
    let pts: Vec<Point> = rows
        .iter()
        .map(|r| point(r))
        .collect::<Result<_>>()
        .with_context(|| format!("{what} has an invalid point"))?;
    Cloud::new(pts, dedup_tol).map_err(|e| anyhow!("{what}: {e}"))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("config is not valid JSON for the expected schema")
    }

    pub fn load(&self) -> Result<LoadedConfig> {
        if self.domain.lo.len() != self.dim || self.domain.hi.len() != self.dim {
            bail!(
                "domain dimension {} does not match declared dim {}",
                self.domain.lo.len(),
                self.dim
            );
        }
        let domain = DomainBox::new(point(&self.domain.lo)?, point(&self.domain.hi)?)
            .map_err(|e| anyhow!("bad domain box: {e}"))?;
        let maps: Vec<MapDescriptor> = self
            .maps
            .iter()
            .map(map_from_spec)
            .collect::<Result<_>>()?;
        let system = IfsSystem::new(maps, domain, self.options.self_mapping)
            .map_err(|e| anyhow!("invalid function system: {e}"))?;
        let members: Vec<PseudometricDescriptor> = self
            .metrics
            .iter()
            .map(metric_from_spec)
            .collect::<Result<_>>()?;
        let multimetric = Multimetric::new(members, self.options.separates_points)
            .map_err(|e| anyhow!("invalid multimetric: {e}"))?;
        let seed_cloud =
            cloud_from_rows(&self.options.seed_cloud, self.options.dedup_tol, "seed_cloud")?;
        let invariant_cloud = cloud_from_rows(
            &self.options.invariant_cloud,
            self.options.dedup_tol,
            "invariant_cloud",
        )?;
        Ok(LoadedConfig {
            system,
            multimetric,
            seed_cloud,
            invariant_cloud,
            name: self.options.name.clone(),
        })
    }

    pub fn from_entry(entry: &CorpusEntry) -> Result<Self> {
        let rows = |c: &Cloud| -> Vec<Vec<f64>> {
            c.points().iter().map(|p| p.coords().to_vec()).collect()
        };
        Ok(ConfigFile {
            dim: entry.system.dim(),
            domain: DomainSpec {
                lo: entry.system.domain().lo().coords().to_vec(),
                hi: entry.system.domain().hi().coords().to_vec(),
            },
            maps: entry.system.maps().iter().map(map_to_spec).collect(),
            metrics: entry
                .multimetric
                .members()
                .iter()
                .map(metric_to_spec)
                .collect::<Result<_>>()?,
            options: Options {
                name: Some(entry.name.to_string()),
                self_mapping: entry.system.self_mapping_declared(),
                separates_points: entry.multimetric.separates_points_declared(),
                dedup_tol: entry.seed_cloud.dedup_tol(),
                seed_cloud: rows(&entry.seed_cloud),
                invariant_cloud: rows(&entry.invariant_cloud),
                notes: Some(entry.notes.to_string()),
            },
        })
    }
}

pub fn read_config(path: &std::path::Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    ConfigFile::parse(&text)?.load()
}
