use std::collections::BTreeSet;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freespace::SpaceClass;
use crate::io_kitti::LabelArray;

/// Binary ground truth for one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    Free,
    Occupied,
    Ignored,
}

/// Semantic ids in `freespace_ids` are free; id 0 (unlabeled) is ignored;
/// everything else is occupied.
pub fn aggregate_gt(labels: &LabelArray, freespace_ids: &BTreeSet<u16>) -> Vec<Truth> {
    labels
        .labels
        .iter()
        .map(|l| match l.semantic_id {
            0 => Truth::Ignored,
            id if freespace_ids.contains(&id) => Truth::Free,
            _ => Truth::Occupied,
        })
        .collect()
}

/// Confusion counts with free space as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    pub ignored: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn + self.ignored
    }

    pub fn scores(&self) -> IouScores {
        miou(self)
    }
}

impl Add for ConfusionCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { tp: self.tp + o.tp, fp: self.fp + o.fp, fn_: self.fn_ + o.fn_, tn: self.tn + o.tn, ignored: self.ignored + o.ignored }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

/// Points with ignored ground truth are counted only in `ignored`. An
/// invalid prediction counts as not-free.
pub fn confusion(pred: &[SpaceClass], gt: &[Truth]) -> Result<ConfusionCounts> {
    if pred.len() != gt.len() {
        return Err(Error::LengthMismatch { what: "predictions vs ground truth", left: pred.len(), right: gt.len() });
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in pred.iter().zip(gt) {
        let predicted_free = p == SpaceClass::Free;
        match (t, predicted_free) {
            (Truth::Ignored, _) => c.ignored += 1,
            (Truth::Free, true) => c.tp += 1,
            (Truth::Free, false) => c.fn_ += 1,
            (Truth::Occupied, true) => c.fp += 1,
            (Truth::Occupied, false) => c.tn += 1,
        }
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IouScores {
    pub iou_free: f64,
    pub iou_occupied: f64,
    pub miou: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class IoU and their two-class mean. An empty class (0/0) scores 1.
pub fn miou(c: &ConfusionCounts) -> IouScores {
    let iou_free = ratio(c.tp, c.tp + c.fp + c.fn_);
    let iou_occupied = ratio(c.tn, c.tn + c.fn_ + c.fp);
    IouScores { iou_free, iou_occupied, miou: (iou_free + iou_occupied) / 2.0 }
}
