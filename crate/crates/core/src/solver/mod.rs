//! The group-detection objective and its optimizer.
//!
//! The energy of an assignment of persons to o-space centres is
//!
//! ```text
//! J'(O | TS) = Σ_i |O_{G_i} − μ_i|² + w·|O| + σ²·Σ_i Σ_{j≠i} R_ij(O_{G_i})
//! ```
//!
//! where `μ_i` is person `i`'s transactional centre, `w` the per-centre
//! description-length cost and `R_ij` the visibility penalty for `j`
//! standing between `i` and the centre. Every term besides `w·|O|` is unary
//! in the assignment, so each assignment step is a facility-location
//! problem over the current pool of candidate centres.

mod assign;
mod brute;
mod cost;
mod detect;

use alloc::vec::Vec;

pub use assign::{assign_labels, EXACT_LABEL_LIMIT, EXACT_PERSON_LIMIT};
pub use brute::{brute_force_detect, BRUTE_FORCE_LIMIT};
pub use cost::{data_cost, total_cost, visibility_cost};
pub use detect::{detect_groups, update_centers, Detection, SolveTrace, CONVERGENCE_TOLERANCE};

use crate::geometry::Point;
use crate::model::{GroupSet, Scene};

/// Persons mapped to o-space centres. `label_of[i]` indexes `centers`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub label_of: Vec<usize>,
    pub centers: Vec<Point>,
}

impl Assignment {
    /// Every person on its own centre.
    pub fn singletons(centers: Vec<Point>) -> Self {
        Self {
            label_of: (0..centers.len()).collect(),
            centers,
        }
    }

    /// Number of centres with at least one member.
    pub fn active_count(&self) -> usize {
        let mut used = alloc::vec![false; self.centers.len()];
        for &l in &self.label_of {
            if let Some(u) = used.get_mut(l) {
                *u = true;
            }
        }
        used.into_iter().filter(|&u| u).count()
    }

    /// Drops centres nobody uses, keeping the relative order of the rest.
    pub fn compact(&mut self) {
        let mut remap = alloc::vec![usize::MAX; self.centers.len()];
        for &l in &self.label_of {
            remap[l] = 0;
        }
        let mut centers = Vec::new();
        for (old, slot) in remap.iter_mut().enumerate() {
            if *slot == 0 {
                *slot = centers.len();
                centers.push(self.centers[old]);
            }
        }
        for l in &mut self.label_of {
            *l = remap[*l];
        }
        self.centers = centers;
    }

    /// Members of each centre, as person indices, in centre order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.centers.len()];
        for (i, &l) in self.label_of.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// The induced partition with singleton labels dropped.
    pub fn group_set(&self, scene: &Scene) -> GroupSet {
        let persons = scene.persons();
        GroupSet::from_clusters(
            self.clusters()
                .into_iter()
                .map(|c| c.into_iter().map(|i| persons[i].id).collect::<Vec<_>>()),
        )
        .expect("labels partition the scene's unique ids")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_drops_unused_centres() {
        let mut a = Assignment {
            label_of: alloc::vec![2, 0, 2],
            centers: alloc::vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0)],
        };
        assert_eq!(a.active_count(), 2);
        a.compact();
        assert_eq!(a.label_of, alloc::vec![1, 0, 1]);
        assert_eq!(a.centers, alloc::vec![Point::new(0.0, 0.0), Point::new(2.0, 2.0)]);
        assert_eq!(a.clusters(), alloc::vec![alloc::vec![1], alloc::vec![0, 2]]);
    }
}
