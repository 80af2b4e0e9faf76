//! Machine-readable report types. Field order is fixed by the struct
//! declarations, and every report deserializes back into the same type,
//! so re-serialization is byte-identical.

use hutchfrac_core::oscillation::{Certificate, ConditionFinding, Witness};
use hutchfrac_core::{Condition, ContractivityReport, PseudometricDescriptor, Verdict};
use serde::{Deserialize, Serialize};

use crate::config::{metric_to_spec, MetricSpec};

/// The single JSON line printed on standard output after an attractor
/// run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TraceSummary {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_residual: Option<f64>,
    pub points: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WitnessJson {
    pub pair: (Vec<f64>, Vec<f64>),
    pub images: (Vec<f64>, Vec<f64>),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateJson {
    LipschitzBound { value: f64 },
    DerivativeBound { value: f64 },
    ConstantIterate { depth: usize },
    PowerContraction { power: usize, lambda: f64 },
    ProfileDecay { iterations: usize },
    Chain,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FindingJson {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MetricReportJson {
    pub metric: MetricJson,
    pub banach: FindingJson,
    pub rakotch: FindingJson,
    pub krasnoselskii: FindingJson,
    pub matkowski: FindingJson,
    pub eventual: FindingJson,
    pub edelstein: FindingJson,
}

/// Config-expressible metrics serialize structurally; runtime handles
/// fall back to a label.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MetricJson {
    Spec(MetricSpec),
    Label(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClassifyReportJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub domain_lo: Vec<f64>,
    pub domain_hi: Vec<f64>,
    pub note: String,
    pub chain_consistent: bool,
    pub metrics: Vec<MetricReportJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RemetrizeReportJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: String,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum VerificationJson {
    Edelstein {
        pairs_checked: usize,
        pairs_skipped: usize,
        violations: usize,
        passed: bool,
    },
    Krasnoselskii {
        sup_ratio: f64,
        lambda: f64,
        pairs_used: usize,
        passed: bool,
    },
    BanachPower {
        max_ratio: f64,
        bound: f64,
        pairs_checked: usize,
        violations: usize,
        passed: bool,
    },
}

fn witness_json(w: &Witness) -> WitnessJson {
    WitnessJson {
        pair: (w.pair.0.coords().to_vec(), w.pair.1.coords().to_vec()),
        images: (w.images.0.coords().to_vec(), w.images.1.coords().to_vec()),
        word: w.word.as_ref().map(|wd| wd.letters().to_vec()),
        ratio: w.ratio,
    }
}

fn certificate_json(c: &Certificate) -> CertificateJson {
    match c {
        Certificate::LipschitzBound(v) => CertificateJson::LipschitzBound { value: *v },
        Certificate::DerivativeBound(v) => CertificateJson::DerivativeBound { value: *v },
        Certificate::ConstantIterate { depth } => {
            CertificateJson::ConstantIterate { depth: *depth }
        }
        Certificate::PowerContraction { power, lambda } => CertificateJson::PowerContraction {
            power: *power,
            lambda: *lambda,
        },
        Certificate::ProfileDecay { iterations } => CertificateJson::ProfileDecay {
            iterations: *iterations,
        },
        Certificate::Chain => CertificateJson::Chain,
    }
}

fn finding_json(f: &ConditionFinding) -> FindingJson {
    FindingJson {
        verdict: f.verdict.as_str().to_string(),
        certificate: f.certificate.as_ref().map(certificate_json),
        witness: f.witness.as_ref().map(witness_json),
        note: f.note.clone(),
    }
}

fn metric_json(d: &PseudometricDescriptor) -> MetricJson {
    match metric_to_spec(d) {
        Ok(spec) => MetricJson::Spec(spec),
        Err(_) => MetricJson::Label(match d {
            PseudometricDescriptor::Remetrized(_) => "remetrized".to_string(),
            PseudometricDescriptor::BanachPower(_) => "banach_power".to_string(),
            other => format!("{other:?}"),
        }),
    }
}

pub fn classify_report_json(
    report: &ContractivityReport,
    name: Option<&str>,
) -> ClassifyReportJson {
    let metrics = report
        .per_metric
        .iter()
        .map(|mr| MetricReportJson {
            metric: metric_json(&mr.metric),
            banach: finding_json(mr.finding(Condition::Banach)),
            rakotch: finding_json(mr.finding(Condition::Rakotch)),
            krasnoselskii: finding_json(mr.finding(Condition::Krasnoselskii)),
            matkowski: finding_json(mr.finding(Condition::Matkowski)),
            eventual: finding_json(mr.finding(Condition::Eventual)),
            edelstein: finding_json(mr.finding(Condition::Edelstein)),
        })
        .collect();
    ClassifyReportJson {
        name: name.map(String::from),
        domain_lo: report.domain.lo().coords().to_vec(),
        domain_hi: report.domain.hi().coords().to_vec(),
        note: report.note.clone(),
        chain_consistent: report.chain_consistent(),
        metrics,
    }
}

/// `true` iff the report carries a verdict string equal to `want` for
/// the given condition on any metric.
pub fn any_verdict(report: &ContractivityReport, cond: Condition, want: Verdict) -> bool {
    report.per_metric.iter().any(|mr| mr.verdict(cond) == want)
}
