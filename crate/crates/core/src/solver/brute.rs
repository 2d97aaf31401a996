use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::model::{transactional_center, GroupSet, Params, Scene};

use super::{total_cost, Assignment};

pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Exhaustive search over every set partition of the scene (restricted
/// growth strings), each block centred on the mean of its members'
/// transactional centres. Returns the cheapest partition, without its
/// singletons, and its cost.
pub fn brute_force_detect(scene: &Scene, params: &Params) -> Result<(GroupSet, f64)> {
    params.validate()?;
    let n = scene.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            persons: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n == 0 {
        return Ok((GroupSet::empty(), 0.0));
    }
    let mu: Vec<Point> = scene
        .persons()
        .iter()
        .map(|p| transactional_center(p, params.stride_d))
        .collect();

    let mut best: Option<(f64, Assignment)> = None;
    let mut rgs = alloc::vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().map_or(0, |m| m + 1);
        let centers: Vec<Point> = (0..blocks)
            .map(|b| {
                Point::mean(rgs.iter().zip(&mu).filter(|(l, _)| **l == b).map(|(_, m)| m))
                    .expect("restricted growth strings have no empty blocks")
            })
            .collect();
        let asg = Assignment {
            label_of: rgs.clone(),
            centers,
        };
        let cost = total_cost(scene, &asg, params)?;
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, asg));
        }
        if !next_partition(&mut rgs) {
            break;
        }
    }
    let (cost, asg) = best.expect("at least one partition");
    Ok((asg.group_set(scene), cost))
}

/// Advances a restricted growth string; `false` after the last one.
fn next_partition(rgs: &mut [usize]) -> bool {
    for k in (1..rgs.len()).rev() {
        let prefix_max = rgs[..k].iter().copied().max().unwrap_or(0);
        if rgs[k] <= prefix_max {
            rgs[k] += 1;
            for r in &mut rgs[k + 1..] {
                *r = 0;
            }
            return true;
        }
    }
    false
}
