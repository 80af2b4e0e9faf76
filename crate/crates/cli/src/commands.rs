//! Subcommand implementations. Each returns the process exit code;
//! diagnostics go to standard error, structured output to files and a
//! single JSON trace line to standard output.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use hutchfrac_core::corpus::{self, load_example};
use hutchfrac_core::hutchinson::{attractor_deterministic, chaos_game};
use hutchfrac_core::oscillation::classify;
use hutchfrac_core::remetrize::{
    build_banach_power, build_remetrized, verify_banach_under, verify_edelstein_under,
    verify_krasnoselskii_under, AlphaSequence, RemetrizeError,
};
use hutchfrac_core::{ClassifyConfig, Cloud};

use crate::config::{read_config, ConfigFile, LoadedConfig};
use crate::exit;
use crate::output::{cloud_csv, cloud_ppm};
use crate::reports::{
    classify_report_json, RemetrizeReportJson, TraceSummary, VerificationJson,
};
use crate::suites;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Deterministic,
    Chaos,
}

pub struct AttractorOpts {
    pub tol: f64,
    pub max_iter: usize,
    pub out_csv: Option<PathBuf>,
    pub render_ppm: Option<PathBuf>,
    pub width: usize,
    pub height: usize,
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

fn load_or_config_error(path: &Path) -> Result<LoadedConfig, i32> {
    read_config(path).map_err(|e| {
        eprintln!("config error: {e:#}");
        exit::CONFIG_ERROR
    })
}

fn write_report<T: serde::Serialize>(path: &Path, report: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn emit_artifacts(
    cloud: &Cloud,
    domain: &hutchfrac_core::DomainBox,
    opts: &AttractorOpts,
) -> Result<()> {
    if let Some(path) = &opts.out_csv {
        std::fs::write(path, cloud_csv(cloud))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &opts.render_ppm {
        std::fs::write(path, cloud_ppm(cloud, domain, opts.width, opts.height))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

pub fn cmd_attractor(config_path: &Path, opts: &AttractorOpts) -> Result<i32> {
    let loaded = match load_or_config_error(config_path) {
        Ok(l) => l,
        Err(code) => return Ok(code),
    };
    let (cloud, iterations, converged, final_residual) = match opts.algorithm {
        Algorithm::Deterministic => {
            let trace = attractor_deterministic(
                &loaded.system,
                &loaded.seed_cloud,
                &loaded.multimetric.members()[0],
                opts.tol,
                opts.max_iter,
            )
            .map_err(|e| anyhow::anyhow!("attractor iteration failed: {e}"))?;
            let residual = trace.residuals.last().copied();
            (
                trace.final_cloud,
                trace.iterations,
                trace.converged,
                residual,
            )
        }
        Algorithm::Chaos => {
            let start = loaded.seed_cloud.points()[0].clone();
            let cloud = chaos_game(
                &loaded.system,
                &start,
                opts.iterations,
                opts.burn_in,
                opts.seed,
            )
            .map_err(|e| anyhow::anyhow!("chaos game failed: {e}"))?;
            (cloud, opts.iterations, true, None)
        }
    };
    emit_artifacts(&cloud, loaded.system.domain(), opts)?;
    let summary = TraceSummary {
        command: "attractor".to_string(),
        name: loaded.name.clone(),
        iterations,
        converged,
        final_residual,
        points: cloud.len(),
        seed: opts.seed,
    };
    println!("{}", serde_json::to_string(&summary)?);
    Ok(if converged {
        exit::OK
    } else {
        exit::NON_CONVERGENCE
    })
}

pub fn cmd_classify(config_path: &Path, report_json: Option<&Path>, seed: u64) -> Result<i32> {
    let loaded = match load_or_config_error(config_path) {
        Ok(l) => l,
        Err(code) => return Ok(code),
    };
    let mut cfg = ClassifyConfig::for_system(&loaded.system);
    cfg.seed = seed;
    let report = classify(&loaded.system, &loaded.multimetric, &cfg)
        .map_err(|e| anyhow::anyhow!("classification failed: {e}"))?;
    let json = classify_report_json(&report, loaded.name.as_deref());
    if let Some(path) = report_json {
        write_report(path, &json)?;
    }
    println!("{}", serde_json::to_string(&json)?);
    Ok(exit::OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyKind {
    Edelstein,
    Krasnoselskii,
    BanachPower,
}

pub struct RemetrizeOpts {
    pub eps: f64,
    pub pairs: usize,
    pub verify: Option<VerifyKind>,
    pub report_json: Option<PathBuf>,
    pub power: usize,
    pub rate: f64,
    pub window_lo: f64,
    pub window_hi: Option<f64>,
    pub seed: u64,
}

pub fn cmd_remetrize(config_path: &Path, opts: &RemetrizeOpts) -> Result<i32> {
    let loaded = match load_or_config_error(config_path) {
        Ok(l) => l,
        Err(code) => return Ok(code),
    };
    let base = loaded.multimetric.members()[0].clone();
    let mut report = RemetrizeReportJson {
        name: loaded.name.clone(),
        kind: String::new(),
        depth: 0,
        eps: None,
        tail_bound: None,
        power: None,
        rate: None,
        lambda: None,
        verification: None,
    };
    let mut passed = true;
    if opts.verify == Some(VerifyKind::BanachPower) {
        let bp = match build_banach_power(&loaded.system, base, opts.power, opts.rate, 256) {
            Ok(bp) => bp,
            Err(e) => {
                eprintln!("banach-power build failed: {e}");
                return Ok(exit::REMETRIZE_FAILURE);
            }
        };
        report.kind = "banach_power".to_string();
        report.depth = bp.depth();
        report.power = Some(bp.power());
        report.rate = Some(bp.a());
        report.lambda = Some(bp.lambda());
        let check = verify_banach_under(&bp, opts.pairs, opts.seed)
            .map_err(|e| anyhow::anyhow!("banach-power verification failed: {e}"))?;
        passed = check.violations.is_empty();
        report.verification = Some(VerificationJson::BanachPower {
            max_ratio: check.max_ratio,
            bound: 1.0 / bp.a(),
            pairs_checked: check.checked,
            violations: check.violations.len(),
            passed,
        });
    } else {
        // keep the per-depth word count inside the builder's node
        // budget so a hopeless system fails with a named widest word
        // instead of a budget error
        let k = loaded.system.maps().len().max(2) as f64;
        let depth_cap = (((1u64 << 20) as f64).ln() / k.ln()).floor() as usize;
        let rm = match build_remetrized(
            &loaded.system,
            base,
            AlphaSequence::TwoMinusHalfPow,
            loaded.invariant_cloud.clone(),
            opts.eps,
            depth_cap.min(32),
        ) {
            Ok(rm) => rm,
            Err(RemetrizeError::TailNotAchievable {
                depth_cap,
                tail,
                offending_word,
            }) => {
                eprintln!(
                    "remetrization failed: tail bound {tail} still above eps {} at \
                     depth cap {depth_cap}; offending word {offending_word}",
                    opts.eps
                );
                return Ok(exit::REMETRIZE_FAILURE);
            }
            Err(e) => {
                eprintln!("remetrization failed: {e}");
                return Ok(exit::REMETRIZE_FAILURE);
            }
        };
        report.kind = "remetrized".to_string();
        report.depth = rm.depth();
        report.eps = Some(opts.eps);
        report.tail_bound = Some(rm.tail_bound());
        match opts.verify {
            Some(VerifyKind::Edelstein) => {
                let check = verify_edelstein_under(&rm, opts.pairs, opts.seed)
                    .map_err(|e| anyhow::anyhow!("edelstein verification failed: {e}"))?;
                passed = check.violations.is_empty();
                report.verification = Some(VerificationJson::Edelstein {
                    pairs_checked: check.checked,
                    pairs_skipped: check.skipped,
                    violations: check.violations.len(),
                    passed,
                });
            }
            Some(VerifyKind::Krasnoselskii) => {
                let hi = opts
                    .window_hi
                    .unwrap_or(2.0 * loaded.system.domain().diagonal());
                let check =
                    verify_krasnoselskii_under(&rm, opts.window_lo, hi, opts.pairs, opts.seed)
                        .map_err(|e| anyhow::anyhow!("krasnoselskii verification failed: {e}"))?;
                passed = check.passed;
                report.verification = Some(VerificationJson::Krasnoselskii {
                    sup_ratio: check.sup_ratio,
                    lambda: check.lambda,
                    pairs_used: check.pairs_used,
                    passed,
                });
            }
            _ => {}
        }
    }
    if let Some(path) = &opts.report_json {
        write_report(path, &report)?;
    }
    println!("{}", serde_json::to_string(&report)?);
    Ok(if passed {
        exit::OK
    } else {
        exit::VERIFICATION_FAILURE
    })
}

pub fn cmd_verify(suite: &str, seed: u64) -> Result<i32> {
    let ok = match suite {
        "axioms" => suites::suite_axioms(seed)?,
        "chain" => suites::suite_chain()?,
        "examples" => suites::suite_examples()?,
        "all" => {
            let a = suites::suite_axioms(seed)?;
            let b = suites::suite_chain()?;
            let c = suites::suite_examples()?;
            a && b && c
        }
        other => {
            eprintln!("unknown suite '{other}' (expected axioms|chain|examples|all)");
            return Ok(exit::CONFIG_ERROR);
        }
    };
    Ok(if ok {
        exit::OK
    } else {
        exit::VERIFICATION_FAILURE
    })
}

pub fn cmd_corpus_list() -> Result<i32> {
    for name in corpus::ALL_NAMES {
        println!("{name}");
    }
    Ok(exit::OK)
}

pub fn cmd_corpus_export(name: &str, out: Option<&Path>) -> Result<i32> {
    let entry = match load_example(name) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{e}");
            return Ok(exit::CONFIG_ERROR);
        }
    };
    let config = ConfigFile::from_entry(&entry)?;
    let mut text = serde_json::to_string_pretty(&config)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(exit::OK)
}
