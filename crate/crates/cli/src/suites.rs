//! Self-check suites behind `hutchfrac verify`: pseudometric axioms,
//! implication-chain consistency, and the pinned fixture expectations.

use anyhow::Result;
use hutchfrac_core::corpus::{load_example, run_oracles, ALL_NAMES};
use hutchfrac_core::metrics::check_axioms;
use hutchfrac_core::oscillation::classify;
use hutchfrac_core::remetrize::{
    banach_power_descriptor, build_banach_power, build_remetrized, remetrized_descriptor,
    AlphaSequence,
};
use hutchfrac_core::{Cloud, Condition, PseudometricDescriptor};

fn report(ok: bool, label: &str) -> bool {
    println!("{} {label}", if ok { "ok  " } else { "FAIL" });
    ok
}

/// Grid sample of an entry's domain box, sized so the axiom checker
/// stays fast in high dimension.
fn sample_cloud(entry: &hutchfrac_core::corpus::CorpusEntry) -> Result<Cloud> {
    let per_axis = match entry.system.dim() {
        1 => 40,
        2 => 7,
        3 => 4,
        _ => 2,
    };
    Ok(Cloud::new(entry.system.domain().grid(per_axis), 0.0)
        .map_err(|e| anyhow::anyhow!("{e}"))?)
}

pub fn suite_axioms(seed: u64) -> Result<bool> {
    let mut all = true;
    for name in ALL_NAMES {
        let entry = load_example(name).map_err(|e| anyhow::anyhow!("{e}"))?;
        let sample = sample_cloud(&entry)?;
        for (i, d) in entry.multimetric.members().iter().enumerate() {
            let rep = check_axioms(d, &sample, seed).map_err(|e| anyhow::anyhow!("{e}"))?;
            all &= report(rep.is_clean(), &format!("axioms/{name}/metric{i}"));
        }
    }
    // the constructed pseudometrics must satisfy the axioms too; a
    // coarse grid keeps the exhaustive triple scan affordable, since
    // each evaluation walks a word tree
    let sierp = load_example("sierpinski").map_err(|e| anyhow::anyhow!("{e}"))?;
    let rm = build_remetrized(
        &sierp.system,
        PseudometricDescriptor::Euclidean,
        AlphaSequence::TwoMinusHalfPow,
        sierp.invariant_cloud.clone(),
        1e-2,
        32,
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    let sample = Cloud::new(sierp.system.domain().grid(3), 0.0)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let rep = check_axioms(&remetrized_descriptor(rm), &sample, seed)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    all &= report(rep.is_clean(), "axioms/sierpinski/remetrized");
    let swap = load_example("swap_halve").map_err(|e| anyhow::anyhow!("{e}"))?;
    let bp = build_banach_power(&swap.system, PseudometricDescriptor::SupNorm, 2, 1.2, 256)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let sample = Cloud::new(swap.system.domain().grid(3), 0.0)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let rep = check_axioms(&banach_power_descriptor(bp), &sample, seed)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    all &= report(rep.is_clean(), "axioms/swap_halve/banach_power");
    Ok(all)
}

pub fn suite_chain() -> Result<bool> {
    let mut all = true;
    for name in ALL_NAMES {
        let entry = load_example(name).map_err(|e| anyhow::anyhow!("{e}"))?;
        let rep = classify(&entry.system, &entry.multimetric, &entry.classify_config)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        all &= report(rep.chain_consistent(), &format!("chain/{name}"));
    }
    Ok(all)
}

pub fn suite_examples() -> Result<bool> {
    let mut all = true;
    for name in ALL_NAMES {
        let oracle = run_oracles(name).map_err(|e| anyhow::anyhow!("{e}"))?;
        all &= report(oracle.all_within(), &format!("examples/{name}/oracles"));
        let entry = load_example(name).map_err(|e| anyhow::anyhow!("{e}"))?;
        let rep = classify(&entry.system, &entry.multimetric, &entry.classify_config)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let mut verdicts_ok = true;
        for exp in &entry.expected {
            let mr = &rep.per_metric[exp.metric_index];
            for (k, cond) in Condition::ALL.iter().enumerate() {
                verdicts_ok &= mr.verdict(*cond) == exp.verdicts[k];
            }
        }
        all &= report(verdicts_ok, &format!("examples/{name}/verdicts"));
    }
    Ok(all)
}
