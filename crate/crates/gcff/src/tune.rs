//! Grid search for stride and sigma on one half of an annotated sequence.

use gcff_core::metrics::aggregate_counts;
use gcff_core::{detect_groups, Params, Scene};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Tolerance used to score grid cells.
pub const TUNE_TOLERANCE: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub stride_d: f64,
    pub sigma: f64,
    pub train_f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub best: Params,
    pub train_f1: f64,
    pub held_out_f1: f64,
    pub train_frames: Vec<String>,
    pub held_out_frames: Vec<String>,
    /// Every cell in search order, strides outer and sigmas inner.
    pub grid: Vec<GridCell>,
}

/// F1 at `t` of detections on annotated `scenes`.
pub fn score(scenes: &[&Scene], params: &Params, t: f64) -> Result<f64> {
    let mut frames = Vec::with_capacity(scenes.len());
    for scene in scenes {
        let gt = scene
            .ground_truth()
            .ok_or_else(|| Error::InvalidInput(format!("frame `{}` has no ground truth", scene.frame_id)))?;
        frames.push((gt.clone(), detect_groups(scene, params)?.groups));
    }
    Ok(aggregate_counts(&frames, t)?.scores().f1)
}

/// Trains on the first half of the frames (after an optional seeded
/// shuffle) and reports the best cell's F1 on both halves. `make` turns a
/// `(stride, sigma)` cell into full parameters. The first cell wins ties.
pub fn tune(
    scenes: &[Scene],
    strides: &[f64],
    sigmas: &[f64],
    shuffle_seed: Option<u64>,
    make: impl Fn(f64, f64) -> Params,
) -> Result<TuneResult> {
    if strides.is_empty() || sigmas.is_empty() {
        return Err(Error::InvalidInput("empty parameter grid".into()));
    }
    if let Some(v) = strides.iter().chain(sigmas).find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidInput(format!("grid value {v} is not a positive number")));
    }
    if scenes.len() < 2 {
        return Err(Error::InvalidInput("tuning needs at least two frames".into()));
    }
    let mut order: Vec<&Scene> = scenes.iter().collect();
    if let Some(seed) = shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let (train, held_out) = order.split_at(order.len() / 2);

    let mut grid = Vec::with_capacity(strides.len() * sigmas.len());
    let mut best: Option<(Params, f64)> = None;
    for &d in strides {
        for &sigma in sigmas {
            let params = make(d, sigma);
            params.validate()?;
            let f1 = score(train, &params, TUNE_TOLERANCE)?;
            grid.push(GridCell {
                stride_d: d,
                sigma,
                train_f1: f1,
            });
            if best.as_ref().is_none_or(|(_, b)| f1 > *b) {
                best = Some((params, f1));
            }
        }
    }
    let (best, train_f1) = best.expect("grid is non-empty");
    Ok(TuneResult {
        held_out_f1: score(held_out, &best, TUNE_TOLERANCE)?,
        best,
        train_f1,
        train_frames: train.iter().map(|s| s.frame_id.clone()).collect(),
        held_out_frames: held_out.iter().map(|s| s.frame_id.clone()).collect(),
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gcff_core::synth::synthetic_scenes;

    fn scenes() -> Vec<Scene> {
        synthetic_scenes(6, 3, &Params::new(30.0, 80.0)).unwrap()
    }

    #[test]
    fn single_cell() {
        let r = tune(&scenes(), &[25.0], &[70.0], None, Params::new).unwrap();
        assert_eq!((r.best.stride_d, r.best.sigma), (25.0, 70.0));
        assert_eq!(r.grid.len(), 1);
        assert_eq!(r.train_frames, ["0", "1", "2"]);
        assert_eq!(r.held_out_frames, ["3", "4", "5"]);
    }

    #[test]
    fn degenerate_grids() {
        let s = scenes();
        assert!(tune(&s, &[], &[80.0], None, Params::new).is_err());
        assert!(tune(&s, &[30.0], &[], None, Params::new).is_err());
        assert!(tune(&s, &[30.0], &[0.0], None, Params::new).is_err());
        assert!(tune(&s, &[f64::NAN], &[80.0], None, Params::new).is_err());
        assert!(tune(&s[..1], &[30.0], &[80.0], None, Params::new).is_err());
    }

    #[test]
    fn shuffle_is_seeded() {
        let s = scenes();
        let a = tune(&s, &[30.0], &[80.0], Some(5), Params::new).unwrap();
        let b = tune(&s, &[30.0], &[80.0], Some(5), Params::new).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.train_frames, ["0", "1", "2"]);
    }

    #[test]
    fn missing_ground_truth() {
        let mut s = scenes();
        s[0].set_ground_truth(None).unwrap();
        assert!(tune(&s, &[30.0], &[80.0], None, Params::new).is_err());
    }
}
