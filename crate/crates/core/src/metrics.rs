//! Tolerant group matching and the scores built on it.
//!
//! A detected group matches a ground-truth group `G` at tolerance `T` when
//! it contains at least `⌈T·|G|⌉` members of `G` and at most
//! `|G| − ⌈T·|G|⌉` persons outside `G`. Precision and recall aggregate
//! matched, missed and hallucinated groups over frames by summing counts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math;
use crate::model::{Group, GroupSet};

/// Tolerances at which GTM samples the F1 curve: `[1/2, 1]` in three equal steps.
pub const GTM_TOLERANCES: [f64; 4] = [0.5, 2.0 / 3.0, 5.0 / 6.0, 1.0];

/// Slack for `T·|G|` landing a rounding error above an integer.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl MatchCounts {
    pub fn scores(&self) -> Scores {
        precision_recall_f1(*self)
    }
}

impl core::ops::AddAssign for MatchCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
    }
}

impl core::iter::Sum for MatchCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        let mut acc = MatchCounts::default();
        for c in iter {
            acc += c;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn check_tolerance(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(invalid("tolerance must lie in (0, 1]"))
    }
}

fn required_members(t: f64, size: usize) -> usize {
    math::ceil(t * size as f64 - CEIL_SLACK) as usize
}

/// Tolerant match of one detected group against one ground-truth group.
pub fn group_matches(gt: &Group, det: &Group, t: f64) -> Result<bool> {
    check_tolerance(t)?;
    Ok(matches_unchecked(gt, det, t))
}

fn matches_unchecked(gt: &Group, det: &Group, t: f64) -> bool {
    let need = required_members(t, gt.len());
    let hits = gt.intersection_len(det);
    let false_subjects = det.len() - hits;
    hits >= need && false_subjects <= gt.len() - need
}

/// One-to-one matching of a frame's groups. Ground-truth groups are taken
/// largest first (ties: smallest member id) and each claims the unmatched
/// detected group with the largest overlap among those that match it (ties:
/// smallest member id). Returns `(gt index, det index)` pairs.
pub fn match_pairs(gt: &GroupSet, det: &GroupSet, t: f64) -> Result<Vec<(usize, usize)>> {
    check_tolerance(t)?;
    let gts = gt.groups();
    let dets = det.groups();
    let mut order: Vec<usize> = (0..gts.len()).collect();
    order.sort_by(|&a, &b| {
        gts[b]
            .len()
            .cmp(&gts[a].len())
            .then(gts[a].smallest().cmp(&gts[b].smallest()))
    });
    let mut taken = alloc::vec![false; dets.len()];
    let mut pairs = Vec::new();
    for g in order {
        let mut best: Option<(usize, usize)> = None;
        for (d, dg) in dets.iter().enumerate() {
            if taken[d] || !matches_unchecked(&gts[g], dg, t) {
                continue;
            }
            let overlap = gts[g].intersection_len(dg);
            // dets are ordered by smallest member, so the first wins ties
            if best.is_none_or(|(_, o)| overlap > o) {
                best = Some((d, overlap));
            }
        }
        if let Some((d, _)) = best {
            taken[d] = true;
            pairs.push((g, d));
        }
    }
    Ok(pairs)
}

pub fn match_frame(gt: &GroupSet, det: &GroupSet, t: f64) -> Result<MatchCounts> {
    let tp = match_pairs(gt, det, t)?.len();
    Ok(MatchCounts {
        tp,
        fp: det.len() - tp,
        fn_: gt.len() - tp,
    })
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision, recall and their harmonic mean; every `0/0` is 0.
pub fn precision_recall_f1(c: MatchCounts) -> Scores {
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Scores { precision, recall, f1 }
}

/// Counts summed over frames.
pub fn aggregate_counts(frames: &[(GroupSet, GroupSet)], t: f64) -> Result<MatchCounts> {
    let mut acc = MatchCounts::default();
    for (gt, det) in frames {
        acc += match_frame(gt, det, t)?;
    }
    Ok(acc)
}

/// Trapezoidal area under an F1 curve sampled at [`GTM_TOLERANCES`],
/// normalised by the width of the tolerance range.
pub fn gtm_from_curve(f1: [f64; 4]) -> f64 {
    (0.5 * f1[0] + f1[1] + f1[2] + 0.5 * f1[3]) / 3.0
}

/// Aggregate F1 at each of [`GTM_TOLERANCES`].
pub fn f1_curve(frames: &[(GroupSet, GroupSet)]) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (slot, &t) in out.iter_mut().zip(&GTM_TOLERANCES) {
        *slot = aggregate_counts(frames, t)?.scores().f1;
    }
    Ok(out)
}

/// Global Tolerant Matching score over `(ground truth, detection)` frames.
pub fn gtm(frames: &[(GroupSet, GroupSet)]) -> Result<f64> {
    if frames.is_empty() {
        return Err(invalid("GTM needs at least one frame"));
    }
    Ok(gtm_from_curve(f1_curve(frames)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityRow {
    pub size: usize,
    /// Ground-truth groups of this size.
    pub groups: usize,
    pub counts: MatchCounts,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityReport {
    pub rows: Vec<CardinalityRow>,
    pub mean: f64,
    /// Population standard deviation of the per-size F1.
    pub std: f64,
}

/// F1 per ground-truth group size. Matched pairs and misses count toward
/// the size of the ground-truth group; unmatched detections count as false
/// positives for their own size. Only sizes present in the ground truth are
/// reported.
pub fn cardinality_report(frames: &[(GroupSet, GroupSet)], t: f64) -> Result<CardinalityReport> {
    let mut by_size: BTreeMap<usize, (usize, MatchCounts)> = BTreeMap::new();
    let mut stray_fp: BTreeMap<usize, usize> = BTreeMap::new();
    for (gt, det) in frames {
        let pairs = match_pairs(gt, det, t)?;
        let mut gt_hit = alloc::vec![false; gt.len()];
        let mut det_hit = alloc::vec![false; det.len()];
        for &(g, d) in &pairs {
            gt_hit[g] = true;
            det_hit[d] = true;
        }
        for (g, group) in gt.iter().enumerate() {
            let entry = by_size.entry(group.len()).or_default();
            entry.0 += 1;
            if gt_hit[g] {
                entry.1.tp += 1;
            } else {
                entry.1.fn_ += 1;
            }
        }
        for (d, group) in det.iter().enumerate() {
            if !det_hit[d] {
                *stray_fp.entry(group.len()).or_default() += 1;
            }
        }
    }
    let rows: Vec<CardinalityRow> = by_size
        .into_iter()
        .map(|(size, (groups, mut counts))| {
            counts.fp += stray_fp.get(&size).copied().unwrap_or(0);
            CardinalityRow {
                size,
                groups,
                counts,
                f1: counts.scores().f1,
            }
        })
        .collect();
    let (mean, std) = mean_std(rows.iter().map(|r| r.f1));
    Ok(CardinalityReport { rows, mean, std })
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, math::sqrt(var))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub frame_id: String,
    pub counts: MatchCounts,
    pub scores: Scores,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub tolerance: f64,
    pub frames: Vec<FrameReport>,
    pub total: MatchCounts,
    pub scores: Scores,
    /// F1 at each GTM tolerance and the GTM score, when requested.
    pub gtm: Option<([f64; 4], f64)>,
    pub cardinality: Option<CardinalityReport>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    pub gtm: bool,
    pub cardinality: bool,
}

/// Scores labelled frames of `(frame id, ground truth, detection)`.
pub fn evaluate(frames: &[(String, GroupSet, GroupSet)], t: f64, options: EvalOptions) -> Result<EvalReport> {
    check_tolerance(t)?;
    let mut per_frame = Vec::with_capacity(frames.len());
    for (id, gt, det) in frames {
        let counts = match_frame(gt, det, t)?;
        per_frame.push(FrameReport {
            frame_id: id.clone(),
            counts,
            scores: counts.scores(),
        });
    }
    let total: MatchCounts = per_frame.iter().map(|f| f.counts).sum();
    let pairs: Vec<(GroupSet, GroupSet)> = frames.iter().map(|(_, g, d)| (g.clone(), d.clone())).collect();
    let gtm = if options.gtm && !pairs.is_empty() {
        let curve = f1_curve(&pairs)?;
        Some((curve, gtm_from_curve(curve)))
    } else {
        None
    };
    let cardinality = if options.cardinality {
        Some(cardinality_report(&pairs, t)?)
    } else {
        None
    };
    Ok(EvalReport {
        tolerance: t,
        frames: per_frame,
        total,
        scores: total.scores(),
        gtm,
        cardinality,
    })
}
