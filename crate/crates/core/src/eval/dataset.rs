//! Semantic KITTI directory walking and the scan-by-scan evaluation loop.
//!
//! Layout: `<root>/sequences/<NN>/velodyne/<id>.bin` paired with
//! `<root>/sequences/<NN>/labels/<id>.label`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::freespace::Segmenter;
use crate::io_kitti::{read_labels, read_point_cloud, PointCloud};
use crate::scalar::Scalar;

use super::metrics::{aggregate_gt, confusion};
use super::report::{EvalReport, ScanReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanPair {
    pub sequence: String,
    pub name: String,
    pub cloud: PathBuf,
    pub labels: PathBuf,
}

/// Lists scans of the given sequences in sequence then file-name order, up to
/// `limit` scans. Every scan must have a label file.
pub fn discover_scans(root: &Path, sequences: &[String], limit: Option<usize>) -> Result<Vec<ScanPair>> {
    if sequences.is_empty() {
        return Err(Error::Dataset("no sequences given".into()));
    }
    let mut pairs = Vec::new();
    for seq in sequences {
        let seq_dir = root.join("sequences").join(seq);
        let velodyne = seq_dir.join("velodyne");
        let entries = std::fs::read_dir(&velodyne).map_err(|e| Error::io(&velodyne, e))?;
        let mut bins: Vec<PathBuf> =
            entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "bin")).collect();
        bins.sort();
        for cloud in bins {
            if limit.is_some_and(|l| pairs.len() >= l) {
                return Ok(pairs);
            }
            let name = cloud.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let labels = seq_dir.join("labels").join(format!("{name}.label"));
            if !labels.is_file() {
                return Err(Error::Dataset(format!("missing labels {} for scan {}", labels.display(), cloud.display())));
            }
            pairs.push(ScanPair { sequence: seq.clone(), name, cloud, labels });
        }
    }
    Ok(pairs)
}

/// Segments and scores each scan sequentially. Timing covers segmentation
/// only; loading and scoring are excluded.
pub fn evaluate_scans<T: Scalar>(pairs: &[ScanPair], cfg: &RunConfig) -> Result<EvalReport> {
    let segmenter = Segmenter::<T>::new(cfg)?;
    let mut scans = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let cloud: PointCloud<T> = read_point_cloud(&pair.cloud)?;
        let labels = read_labels(&pair.labels)?;
        let labels = cloud.select_records(&labels.labels).map_err(|_| {
            Error::Dataset(format!(
                "{} has {} records but {} has {} labels",
                pair.cloud.display(),
                cloud.record_count(),
                pair.labels.display(),
                labels.len()
            ))
        })?;
        let gt = aggregate_gt(&labels.into_iter().collect(), &cfg.freespace_label_ids);

        let start = Instant::now();
        let result = segmenter.segment(&cloud);
        let seconds = start.elapsed().as_secs_f64();

        let counts = confusion(&result.point_labels, &gt)?;
        scans.push(ScanReport::new(format!("{}/{}", pair.sequence, pair.name), counts, seconds));
    }
    Ok(EvalReport::from_scans(scans))
}

pub fn evaluate_dataset<T: Scalar>(root: &Path, sequences: &[String], cfg: &RunConfig, limit: Option<usize>) -> Result<EvalReport> {
    let pairs = discover_scans(root, sequences, limit)?;
    evaluate_scans::<T>(&pairs, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, write_scene, SceneSpec};

    fn make_dataset(root: &Path, seq: &str, n: usize) {
        let velodyne = root.join("sequences").join(seq).join("velodyne");
        let labels = root.join("sequences").join(seq).join("labels");
        std::fs::create_dir_all(&velodyne).unwrap();
        std::fs::create_dir_all(&labels).unwrap();
        let (cloud, gt) = generate::<f32>(&SceneSpec::with_default_boxes(1.73)).unwrap();
        for i in 0..n {
            let (bin, label) = write_scene(velodyne.join(format!("{i:06}")), &cloud, &gt).unwrap();
            std::fs::rename(label, labels.join(format!("{i:06}.label"))).unwrap();
            assert!(bin.exists());
        }
    }

    #[test]
    fn discovers_in_order_with_limit() {
        let dir = tempfile::tempdir().unwrap();
        make_dataset(dir.path(), "08", 3);
        let pairs = discover_scans(dir.path(), &["08".into()], None).unwrap();
        assert_eq!(pairs.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(), ["000000", "000001", "000002"]);
        assert_eq!(discover_scans(dir.path(), &["08".into()], Some(2)).unwrap().len(), 2);
        assert!(discover_scans(dir.path(), &[], None).is_err());
        assert!(discover_scans(dir.path(), &["09".into()], None).is_err());
    }

    #[test]
    fn missing_labels_fail() {
        let dir = tempfile::tempdir().unwrap();
        make_dataset(dir.path(), "00", 2);
        std::fs::remove_file(dir.path().join("sequences/00/labels/000001.label")).unwrap();
        assert!(matches!(discover_scans(dir.path(), &["00".into()], None), Err(Error::Dataset(_))));
    }

    #[test]
    fn mismatched_label_length_fails() {
        let dir = tempfile::tempdir().unwrap();
        make_dataset(dir.path(), "00", 1);
        std::fs::write(dir.path().join("sequences/00/labels/000000.label"), [0u8; 8]).unwrap();
        let pairs = discover_scans(dir.path(), &["00".into()], None).unwrap();
        assert!(matches!(evaluate_scans::<f32>(&pairs, &RunConfig::default()), Err(Error::Dataset(_))));
    }

    #[test]
    fn synthetic_sequence_scores_well() {
        let dir = tempfile::tempdir().unwrap();
        make_dataset(dir.path(), "08", 2);
        let report = evaluate_dataset::<f32>(dir.path(), &["08".into()], &RunConfig::default(), None).unwrap();
        assert_eq!(report.scan_count, 2);
        // Border rows carry no normals, so some ground lands in OFF_GROUND.
        let s = report.aggregate.scores;
        assert!(s.iou_free > 0.95 && s.miou > 0.8, "{:?}", report.aggregate);
    }
}
