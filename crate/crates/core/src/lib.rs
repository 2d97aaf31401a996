//! Detection of free-standing conversational groups (F-formations) from
//! proxemic data: person positions plus head orientations in the ground plane.
//!
//! Each person projects a transactional segment centre at distance `stride_d`
//! along their head orientation. Groups are found by clustering those centres
//! around shared o-space centres, trading a least-squares fit against a
//! per-centre description-length cost, with an optional visibility penalty
//! for people whose view of the centre is occluded by someone nearer.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, rendering and the
//! command-line driver live in the companion `gcff` crate.
//!
//! Module map:
//! - [`geometry`] and [`model`]: points, persons, scenes, group partitions, parameters.
//! - [`solver`]: the objective, the label-cost assignment step, the alternating
//!   optimizer and an exhaustive oracle for small scenes.
//! - [`metrics`]: tolerant matching, precision/recall/F1, GTM and cardinality breakdowns.
//! - [`synth`]: canonical arrangements, Gaussian noise injection and noise sweeps.
//!
//! ```
//! use gcff_core::{detect_groups, Params, Person, Scene};
//! use std::f64::consts::PI;
//!
//! let scene = Scene::new(
//!     "frame-0",
//!     vec![
//!         Person::new(1, 0.0, 0.0, 0.0)?,
//!         Person::new(2, 60.0, 0.0, PI)?,
//!         Person::new(3, 300.0, 0.0, 0.0)?,
//!     ],
//! )?;
//! let found = detect_groups(&scene, &Params::new(30.0, 80.0))?;
//! assert_eq!(found.groups.len(), 1);
//! assert!(found.groups.groups()[0].members().iter().map(|m| m.0).eq([1, 2]));
//! # Ok::<(), gcff_core::Error>(())
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod geometry;
pub(crate) mod math;
pub mod metrics;
pub mod model;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{angle_about, distance, Point};
pub use model::{
    transactional_center, Group, GroupSet, Params, Person, PersonId, Proposals, Scene, DEFAULT_K_REPULSION,
    DEFAULT_MAX_ITERATIONS, DEFAULT_THETA_HAT,
};
pub use solver::{
    assign_labels, brute_force_detect, data_cost, detect_groups, total_cost, update_centers, visibility_cost,
    Assignment, Detection, SolveTrace,
};
