use crate::error::{Error, Result};
use crate::geometry::{angle_about, distance, Point};
use crate::math;
use crate::model::{transactional_center, Params, Person, Scene};

use super::Assignment;

/// Squared distance between the centre and the person's transactional centre.
pub fn data_cost(p: &Person, center: Point, params: &Params) -> f64 {
    center.squared_distance(&transactional_center(p, params.stride_d))
}

/// Occlusion penalty `Σ_{j≠i} R_ij` for person `i` joining the centre,
/// as a dimensionless sum.
///
/// With the default gate `j` blocks `i` when it lies inside the cone of
/// half-width `theta_hat` around the line of sight from the centre to `i`
/// and is nearer to the centre. With `literal_visibility_gate` the penalty
/// applies outside the cone instead. Either way a blocking `j` contributes
/// `exp(K·cos θ_ij)·(d_i − d_j)/d_j`. Persons standing exactly on the
/// centre contribute nothing.
pub fn visibility_cost(i: usize, scene: &Scene, center: Point, params: &Params) -> f64 {
    let persons = scene.persons();
    let pos_i = persons[i].position();
    let d_i = distance(pos_i, center);
    if d_i == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for (j, pj) in persons.iter().enumerate() {
        if j == i {
            continue;
        }
        let pos_j = pj.position();
        let d_j = distance(pos_j, center);
        if d_j == 0.0 {
            log::warn!("person {} stands on a candidate centre; treated as non-blocking", pj.id);
            continue;
        }
        let theta = match angle_about(center, pos_i, pos_j) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let blocking = if params.literal_visibility_gate {
            !(theta <= params.theta_hat || d_i < d_j)
        } else {
            theta < params.theta_hat && d_i > d_j
        };
        if blocking {
            total += math::exp(params.k_repulsion * math::cos(theta)) * (d_i - d_j) / d_j;
        }
    }
    total
}

/// Unary cost of putting person `i` on `center`, in objective units.
pub(crate) fn unary_cost(scene: &Scene, i: usize, center: Point, params: &Params) -> f64 {
    let mut c = data_cost(&scene.persons()[i], center, params);
    if params.visibility {
        c += params.visibility_scale() * visibility_cost(i, scene, center, params);
    }
    c
}

/// The full objective `J'`: data term, `mdl_weight` per active centre and
/// the visibility penalty scaled by `sigma²`.
pub fn total_cost(scene: &Scene, asg: &Assignment, params: &Params) -> Result<f64> {
    if asg.label_of.len() != scene.len() {
        return Err(Error::InvalidInput(alloc::format!(
            "assignment covers {} persons, scene has {}",
            asg.label_of.len(),
            scene.len()
        )));
    }
    let mut sum = 0.0;
    for (i, &l) in asg.label_of.iter().enumerate() {
        let center = *asg.centers.get(l).ok_or(Error::DanglingLabel {
            person: i,
            label: l,
            labels: asg.centers.len(),
        })?;
        sum += unary_cost(scene, i, center, params);
    }
    Ok(sum + params.mdl_weight * asg.active_count() as f64)
}
