use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{ConfusionCounts, IouScores};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub name: String,
    pub counts: ConfusionCounts,
    #[serde(flatten)]
    pub scores: IouScores,
    pub seconds: f64,
}

impl ScanReport {
    pub fn new(name: String, counts: ConfusionCounts, seconds: f64) -> Self {
        Self { name, scores: counts.scores(), counts, seconds }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub counts: ConfusionCounts,
    #[serde(flatten)]
    pub scores: IouScores,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub total_seconds: f64,
    pub mean_hz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub scan_count: usize,
    /// Scores from globally summed counts.
    pub aggregate: AggregateReport,
    pub timing: TimingSummary,
    pub scans: Vec<ScanReport>,
}

impl EvalReport {
    pub fn from_scans(scans: Vec<ScanReport>) -> Self {
        let counts: ConfusionCounts = scans.iter().map(|s| s.counts).sum();
        let total_seconds: f64 = scans.iter().map(|s| s.seconds).sum();
        let mean_hz = if total_seconds > 0.0 { scans.len() as f64 / total_seconds } else { 0.0 };
        Self {
            scan_count: scans.len(),
            aggregate: AggregateReport { scores: counts.scores(), counts },
            timing: TimingSummary { total_seconds, mean_hz },
            scans,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    /// Aligned table: one row per scan, then the aggregate.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self.scans.iter().map(|s| s.name.len()).max().unwrap_or(0).max(9);
        let _ = writeln!(out, "{:<width$}  {:>9}  {:>9}  {:>9}  {:>9}", "scan", "iou_free", "iou_occ", "miou", "ms");
        for s in &self.scans {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>9.2}",
                s.name,
                s.scores.iou_free,
                s.scores.iou_occupied,
                s.scores.miou,
                s.seconds * 1e3
            );
        }
        let a = &self.aggregate.scores;
        let _ = writeln!(
            out,
            "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>9.2}",
            "aggregate",
            a.iou_free,
            a.iou_occupied,
            a.miou,
            if self.scan_count > 0 { self.timing.total_seconds * 1e3 / self.scan_count as f64 } else { 0.0 }
        );
        let _ = writeln!(out, "scans: {}  mean speed: {:.2} Hz", self.scan_count, self.timing.mean_hz);
        out
    }
}
