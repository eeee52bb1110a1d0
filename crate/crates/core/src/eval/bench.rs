use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freespace::{Segmenter, StageTimings};
use crate::io_kitti::PointCloud;
use crate::scalar::Scalar;

/// Mean seconds spent in each pipeline stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageSeconds {
    pub projection: f64,
    pub normals: f64,
    pub filter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    /// Wall-clock seconds per timed scan.
    pub samples: Vec<f64>,
    pub mean_seconds: f64,
    pub median_seconds: f64,
    /// Samples divided by total seconds.
    pub mean_hz: f64,
    pub median_hz: f64,
    pub stages: StageSeconds,
}

impl TimingReport {
    pub fn from_samples(samples: Vec<f64>, stages: StageSeconds) -> Self {
        let n = samples.len().max(1) as f64;
        let total: f64 = samples.iter().sum();
        let mut sorted = samples.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let median = match sorted.len() {
            0 => 0.0,
            len if len % 2 == 1 => sorted[len / 2],
            len => (sorted[len / 2 - 1] + sorted[len / 2]) / 2.0,
        };
        let hz = |s: f64| if s > 0.0 { 1.0 / s } else { f64::INFINITY };
        Self {
            mean_seconds: total / n,
            median_seconds: median,
            mean_hz: if total > 0.0 { samples.len() as f64 / total } else { f64::INFINITY },
            median_hz: hz(median),
            samples,
            stages,
        }
    }
}

/// Times the full segmentation of in-memory scans on the calling thread.
/// `warmup` untimed runs precede `repeat` timed passes over `scans`.
pub fn benchmark<T: Scalar>(scans: &[PointCloud<T>], segmenter: &Segmenter<T>, warmup: usize, repeat: usize) -> Result<TimingReport> {
    if scans.is_empty() {
        return Err(Error::Dataset("benchmark needs at least one scan".into()));
    }
    for scan in scans.iter().cycle().take(warmup) {
        black_box(segmenter.segment(scan));
    }
    let mut samples = Vec::with_capacity(scans.len() * repeat);
    let mut stages = StageTimings::default();
    for _ in 0..repeat {
        for scan in scans {
            let start = Instant::now();
            let (result, _, timings) = segmenter.segment_detailed(black_box(scan));
            samples.push(start.elapsed().as_secs_f64());
            black_box(result);
            stages += timings;
        }
    }
    let n = samples.len().max(1) as f64;
    let stage_seconds = StageSeconds {
        projection: stages.projection.as_secs_f64() / n,
        normals: stages.normals.as_secs_f64() / n,
        filter: stages.filter.as_secs_f64() / n,
    };
    Ok(TimingReport::from_samples(samples, stage_seconds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::geometry::Vec3;

    fn tiny_scan() -> PointCloud<f32> {
        PointCloud::from_positions((0..50).map(|i| Vec3::new(5.0, i as f32 * 0.1, -1.7)))
    }

    #[test]
    fn sample_counts() {
        let seg = Segmenter::new(&RunConfig::default()).unwrap();
        let scans = vec![tiny_scan(); 10];
        let report = benchmark(&scans, &seg, 3, 1).unwrap();
        assert_eq!(report.samples.len(), 10);
        let mean: f64 = report.samples.iter().sum::<f64>() / 10.0;
        assert!((report.mean_hz - 1.0 / mean).abs() <= 1e-9 * report.mean_hz);

        let one = benchmark(&scans[..1], &seg, 0, 1).unwrap();
        assert_eq!(one.samples.len(), 1);
        assert_eq!(benchmark(&scans[..2], &seg, 0, 5).unwrap().samples.len(), 10);
        assert!(benchmark::<f32>(&[], &seg, 0, 1).is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        let r = TimingReport::from_samples(vec![0.3, 0.1, 0.2], StageSeconds::default());
        assert_eq!(r.median_seconds, 0.2);
        let r = TimingReport::from_samples(vec![0.4, 0.1, 0.2, 0.3], StageSeconds::default());
        assert!((r.median_seconds - 0.25).abs() < 1e-15);
        assert!((r.mean_hz - 4.0).abs() < 1e-12);
    }
}
