//! Serializable report documents. The JSON layout is part of the tool's
//! contract: `version` plus a `config` echo, then either a `results` block
//! (single runs) or a `sweep` array (parameter scans). Comparison runs emit
//! their own two-sided document.

use serde::Serialize;

use crate::experiment::{CompareReport, ExperimentReport, ProtocolComparison, SweepPoint};

/// Bumped whenever a field is renamed, removed, or changes meaning.
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ChannelDoc {
    pub fixed_offset: f64,
    pub jitter_sigma: f64,
    pub flip_prob: f64,
    pub loss_prob: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfigDoc {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

/// Echo of the fully resolved configuration, after defaults, config file,
/// and flags have been merged.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigDoc {
    pub protocol: String,
    pub trials: u64,
    pub bits_per_session: usize,
    pub adversary: String,
    pub attack_passes: Vec<u8>,
    pub eve_basis: f64,
    pub guess_rule: String,
    pub angle_mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<u32>,
    pub check_fraction: f64,
    pub detection_threshold: f64,
    pub channel: ChannelDoc,
    /// Comparison runs may pin different flip rates per protocol.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qtpp_flip_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bb84_flip_prob: Option<f64>,
    pub master_seed: u64,
    pub rng_scheme: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfigDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultsDoc {
    pub mean_qber: f64,
    pub qber_ci95: f64,
    pub eve_accuracy: f64,
    pub eve_ci95: f64,
    pub detection_rate: f64,
    pub sift_fraction: f64,
    pub lost_fraction: f64,
    pub usable_key_fraction: f64,
    pub sessions_errored: u64,
}

impl From<&ExperimentReport> for ResultsDoc {
    fn from(r: &ExperimentReport) -> Self {
        ResultsDoc {
            mean_qber: r.mean_qber,
            qber_ci95: r.qber_ci95,
            eve_accuracy: r.eve_accuracy,
            eve_ci95: r.eve_ci95,
            detection_rate: r.detection_rate,
            sift_fraction: r.sift_fraction,
            lost_fraction: r.lost_fraction,
            usable_key_fraction: r.usable_key_fraction,
            sessions_errored: r.sessions_errored,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRowDoc {
    pub param_value: f64,
    pub mean_qber: f64,
    pub qber_ci95: f64,
    pub eve_accuracy: f64,
    pub detection_rate: f64,
}

impl From<&SweepPoint> for SweepRowDoc {
    fn from(p: &SweepPoint) -> Self {
        SweepRowDoc {
            param_value: p.param_value,
            mean_qber: p.report.mean_qber,
            qber_ci95: p.report.qber_ci95,
            eve_accuracy: p.report.eve_accuracy,
            detection_rate: p.report.detection_rate,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    pub version: u32,
    pub tool_version: String,
    pub config: ConfigDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<ResultsDoc>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRowDoc>,
}

impl ReportDoc {
    pub fn single(tool_version: &str, config: ConfigDoc, report: &ExperimentReport) -> Self {
        ReportDoc {
            version: REPORT_VERSION,
            tool_version: tool_version.into(),
            config,
            results: Some(report.into()),
            sweep: Vec::new(),
        }
    }

    pub fn sweep(tool_version: &str, config: ConfigDoc, points: &[SweepPoint]) -> Self {
        ReportDoc {
            version: REPORT_VERSION,
            tool_version: tool_version.into(),
            config,
            results: None,
            sweep: points.iter().map(SweepRowDoc::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareSideDoc {
    pub floor: ResultsDoc,
    pub attack: ResultsDoc,
    pub separation_sigma: f64,
    pub usable_key_fraction: f64,
}

impl From<&ProtocolComparison> for CompareSideDoc {
    fn from(c: &ProtocolComparison) -> Self {
        CompareSideDoc {
            floor: (&c.floor).into(),
            attack: (&c.attack).into(),
            separation_sigma: c.separation_sigma,
            usable_key_fraction: c.usable_key_fraction,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareDoc {
    pub version: u32,
    pub tool_version: String,
    pub config: ConfigDoc,
    pub qtpp: CompareSideDoc,
    pub bb84: CompareSideDoc,
}

impl CompareDoc {
    pub fn new(tool_version: &str, config: ConfigDoc, report: &CompareReport) -> Self {
        CompareDoc {
            version: REPORT_VERSION,
            tool_version: tool_version.into(),
            config,
            qtpp: (&report.qtpp).into(),
            bb84: (&report.bb84).into(),
        }
    }
}

/// Pretty JSON with a trailing newline, ready to write to a file or stdout.
pub fn render_json<T: Serialize>(doc: &T) -> serde_json::Result<String> {
    serde_json::to_string_pretty(doc).map(|mut s| {
        s.push('\n');
        s
    })
}

pub const SWEEP_CSV_HEADER: &str =
    "param_name,param_value,mean_qber,qber_ci95_halfwidth,eve_accuracy,detection_rate";

/// CSV rendering of a sweep, one line per grid point.
pub fn render_sweep_csv(param_name: &str, points: &[SweepPoint]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in points {
        let r = &p.report;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            param_name, p.param_value, r.mean_qber, r.qber_ci95, r.eve_accuracy, r.detection_rate
        ));
    }
    out
}
