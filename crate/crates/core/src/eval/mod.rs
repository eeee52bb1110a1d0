//! Segmentation quality against Semantic KITTI ground truth, and throughput.

mod bench;
mod dataset;
mod metrics;
mod report;

pub use bench::{benchmark, StageSeconds, TimingReport};
pub use dataset::{discover_scans, evaluate_dataset, evaluate_scans, ScanPair};
pub use metrics::{aggregate_gt, confusion, miou, ConfusionCounts, IouScores, Truth};
pub use report::{AggregateReport, EvalReport, ScanReport, TimingSummary};
