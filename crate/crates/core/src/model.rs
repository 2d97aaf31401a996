//! Domain types: persons, scenes, group partitions and solver parameters.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::geometry::Point;
use crate::math;

pub const DEFAULT_THETA_HAT: f64 = FRAC_PI_4;
pub const DEFAULT_K_REPULSION: f64 = 1.0;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PersonId(pub u64);

impl fmt::Display for PersonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for PersonId {
    fn from(v: u64) -> Self {
        PersonId(v)
    }
}

/// One individual's proxemic state. `theta` is the head orientation in
/// radians, counter-clockwise from the +x axis, kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Person {
    pub id: PersonId,
    pub x: f64,
    pub y: f64,
    theta: f64,
}

impl Person {
    pub fn new(id: impl Into<PersonId>, x: f64, y: f64, theta: f64) -> Result<Self> {
        let id = id.into();
        if !(x.is_finite() && y.is_finite() && theta.is_finite()) {
            return Err(invalid(alloc::format!("person {id} has a non-finite coordinate")));
        }
        Ok(Self {
            id,
            x,
            y,
            theta: math::wrap_angle(theta),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Centre of the person's transactional segment: `stride_d` ahead along
/// the head orientation.
pub fn transactional_center(p: &Person, stride_d: f64) -> Point {
    Point::new(p.x + stride_d * math::cos(p.theta), p.y + stride_d * math::sin(p.theta))
}

/// A set of at least two person ids, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Group(Vec<PersonId>);

impl Group {
    pub fn new(members: impl IntoIterator<Item = PersonId>) -> Result<Self> {
        let set: BTreeSet<PersonId> = members.into_iter().collect();
        if set.len() < 2 {
            return Err(Error::GroupTooSmall(set.len()));
        }
        Ok(Self(set.into_iter().collect()))
    }

    pub fn members(&self) -> &[PersonId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: PersonId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn smallest(&self) -> PersonId {
        self.0[0]
    }

    pub fn intersection_len(&self, other: &Group) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

/// A partition of (some of) a scene's persons into disjoint groups.
/// Lone individuals are not represented. Groups are ordered by their
/// smallest member so equal partitions compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct GroupSet {
    groups: Vec<Group>,
}

impl GroupSet {
    pub fn new(groups: impl IntoIterator<Item = Group>) -> Result<Self> {
        let mut groups: Vec<Group> = groups.into_iter().collect();
        let mut seen = BTreeSet::new();
        for g in &groups {
            for &id in g.members() {
                if !seen.insert(id) {
                    return Err(Error::OverlappingGroups(id));
                }
            }
        }
        groups.sort_by_key(Group::smallest);
        Ok(Self { groups })
    }

    /// Builds a group set from raw member lists, dropping lists with fewer
    /// than two members (singletons are not groups).
    pub fn from_clusters<I, C>(clusters: I) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = PersonId>,
    {
        let mut groups = Vec::new();
        for c in clusters {
            match Group::new(c) {
                Ok(g) => groups.push(g),
                Err(Error::GroupTooSmall(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Self::new(groups)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Group> {
        self.groups.iter()
    }

    pub fn group_of(&self, id: PersonId) -> Option<&Group> {
        self.groups.iter().find(|g| g.contains(id))
    }
}

impl<'a> IntoIterator for &'a GroupSet {
    type Item = &'a Group;
    type IntoIter = core::slice::Iter<'a, Group>;

    fn into_iter(self) -> Self::IntoIter {
        self.groups.iter()
    }
}

/// One frame: persons in a fixed order plus optional annotated groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub frame_id: String,
    persons: Vec<Person>,
    ground_truth: Option<GroupSet>,
}

impl Scene {
    pub fn new(frame_id: impl Into<String>, persons: Vec<Person>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &persons {
            if !seen.insert(p.id) {
                return Err(Error::DuplicatePerson(p.id));
            }
        }
        Ok(Self {
            frame_id: frame_id.into(),
            persons,
            ground_truth: None,
        })
    }

    pub fn with_ground_truth(mut self, gt: GroupSet) -> Result<Self> {
        self.set_ground_truth(Some(gt))?;
        Ok(self)
    }

    pub fn set_ground_truth(&mut self, gt: Option<GroupSet>) -> Result<()> {
        if let Some(gt) = &gt {
            for g in gt {
                for &id in g.members() {
                    if self.index_of(id).is_none() {
                        return Err(Error::UnknownPerson(id));
                    }
                }
            }
        }
        self.ground_truth = gt;
        Ok(())
    }

    pub fn persons(&self) -> &[Person] {
        &self.persons
    }

    pub fn ground_truth(&self) -> Option<&GroupSet> {
        self.ground_truth.as_ref()
    }

    pub fn len(&self) -> usize {
        self.persons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.persons.is_empty()
    }

    pub fn index_of(&self, id: PersonId) -> Option<usize> {
        self.persons.iter().position(|p| p.id == id)
    }

    /// Same frame and ground truth, persons replaced one-for-one.
    /// Ids must be unchanged.
    pub(crate) fn with_persons(&self, persons: Vec<Person>) -> Self {
        debug_assert!(persons.iter().zip(&self.persons).all(|(a, b)| a.id == b.id));
        Self {
            frame_id: self.frame_id.clone(),
            persons,
            ground_truth: self.ground_truth.clone(),
        }
    }
}

/// Candidate centres offered to each assignment step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Proposals {
    /// Per active group: its current centre and its members' mean.
    PerGroup,
    /// `PerGroup` plus every person's transactional centre and the
    /// one-person-moved and pairwise-merged group means.
    #[default]
    Neighbourhood,
}

/// Solver parameters. Lengths are in the scene's unit; nothing is converted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Distance from a person to their transactional segment centre.
    pub stride_d: f64,
    /// Tolerated deviation of a transactional centre from its o-space centre.
    pub sigma: f64,
    /// Cost of each active o-space centre. Defaults to `sigma²`.
    pub mdl_weight: f64,
    /// Half-width of the occlusion cone.
    pub theta_hat: f64,
    /// Sharpness of the visibility penalty.
    pub k_repulsion: f64,
    pub max_iterations: usize,
    /// Use the as-printed gate (penalise outside the cone) instead of the
    /// occlusion-cone gate.
    pub literal_visibility_gate: bool,
    /// Include the visibility penalty in the objective.
    pub visibility: bool,
    pub proposals: Proposals,
}

impl Params {
    pub fn new(stride_d: f64, sigma: f64) -> Self {
        Self {
            stride_d,
            sigma,
            mdl_weight: sigma * sigma,
            theta_hat: DEFAULT_THETA_HAT,
            k_repulsion: DEFAULT_K_REPULSION,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            literal_visibility_gate: false,
            visibility: true,
            proposals: Proposals::default(),
        }
    }

    pub fn without_visibility(mut self) -> Self {
        self.visibility = false;
        self
    }

    /// Factor converting the dimensionless visibility penalty into the
    /// units of the data term (squared length).
    pub fn visibility_scale(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.stride_d) {
            return Err(invalid("stride_d must be positive"));
        }
        if !positive(self.sigma) {
            return Err(invalid("sigma must be positive"));
        }
        if !positive(self.mdl_weight) {
            return Err(invalid("mdl_weight must be positive"));
        }
        if !(self.theta_hat > 0.0 && self.theta_hat <= PI) {
            return Err(invalid("theta_hat must lie in (0, pi]"));
        }
        if !self.k_repulsion.is_finite() {
            return Err(invalid("k_repulsion must be finite"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::distance;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, TAU};
    use proptest::prelude::*;

    fn ids(v: &[u64]) -> Vec<PersonId> {
        v.iter().copied().map(PersonId).collect()
    }

    #[test]
    fn transactional_center_examples() {
        let c = transactional_center(&Person::new(1, 0.0, 0.0, 0.0).unwrap(), 30.0);
        assert_eq!(c, Point::new(30.0, 0.0));

        let c = transactional_center(&Person::new(1, 10.0, 20.0, FRAC_PI_2).unwrap(), 30.0);
        assert_abs_diff_eq!(c.u, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.v, 50.0, epsilon = 1e-12);

        let c = transactional_center(&Person::new(1, 0.0, 0.0, PI).unwrap(), 20.0);
        assert_abs_diff_eq!(c.u, -20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn person_rejects_non_finite() {
        assert!(Person::new(1, f64::NAN, 0.0, 0.0).is_err());
        assert!(Person::new(1, 0.0, f64::INFINITY, 0.0).is_err());
        assert!(Person::new(1, 0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn theta_is_wrapped() {
        assert_abs_diff_eq!(Person::new(1, 0.0, 0.0, -FRAC_PI_2).unwrap().theta(), 1.5 * PI);
        assert_abs_diff_eq!(Person::new(1, 0.0, 0.0, 5.0 * PI).unwrap().theta(), PI, epsilon = 1e-12);
        assert_eq!(Person::new(1, 0.0, 0.0, TAU).unwrap().theta(), 0.0);
        assert_eq!(Person::new(1, 0.0, 0.0, -1e-300).unwrap().theta(), 0.0);
    }

    #[test]
    fn scene_rejects_duplicates_and_dangling_truth() {
        let p = |id| Person::new(id, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(
            Scene::new("f", vec![p(1), p(2), p(1)]).unwrap_err(),
            Error::DuplicatePerson(PersonId(1))
        );
        let scene = Scene::new("f", vec![p(1), p(2)]).unwrap();
        let gt = GroupSet::new([Group::new(ids(&[1, 3])).unwrap()]).unwrap();
        assert_eq!(
            scene.with_ground_truth(gt).unwrap_err(),
            Error::UnknownPerson(PersonId(3))
        );
    }

    #[test]
    fn group_set_invariants() {
        assert_eq!(Group::new(ids(&[4])).unwrap_err(), Error::GroupTooSmall(1));
        assert_eq!(Group::new(ids(&[4, 4])).unwrap_err(), Error::GroupTooSmall(1));
        let a = Group::new(ids(&[5, 1])).unwrap();
        let b = Group::new(ids(&[2, 5])).unwrap();
        assert_eq!(
            GroupSet::new([a.clone(), b]).unwrap_err(),
            Error::OverlappingGroups(PersonId(5))
        );

        let gs = GroupSet::from_clusters([ids(&[9, 3]), ids(&[7]), ids(&[1, 2, 4])]).unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs.groups()[0].members(), ids(&[1, 2, 4]).as_slice());
        assert_eq!(gs.groups()[1].members(), ids(&[3, 9]).as_slice());
        assert!(gs.group_of(PersonId(7)).is_none());
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(30.0, 80.0).validate().is_ok());
        assert_eq!(Params::new(30.0, 80.0).mdl_weight, 6400.0);
        assert!(Params::new(0.0, 80.0).validate().is_err());
        assert!(Params::new(30.0, -1.0).validate().is_err());
        let mut p = Params::new(30.0, 80.0);
        p.theta_hat = 4.0;
        assert!(p.validate().is_err());
        p.theta_hat = PI;
        assert!(p.validate().is_ok());
        p.max_iterations = 0;
        assert!(p.validate().is_err());
    }

    proptest! {
        #[test]
        fn transactional_center_is_at_stride(
            x in -1e3..1e3f64, y in -1e3..1e3f64, th in -10.0..10.0f64, d in 0.1..500.0f64
        ) {
            let p = Person::new(1, x, y, th).unwrap();
            let c = transactional_center(&p, d);
            prop_assert!((distance(p.position(), c) - d).abs() <= 1e-9 * d);
        }

        #[test]
        fn transactional_center_is_rigid_equivariant(
            x in -1e3..1e3f64, y in -1e3..1e3f64, th in 0.0..TAU,
            d in 0.1..500.0f64, rot in 0.0..TAU, tx in -1e3..1e3f64, ty in -1e3..1e3f64
        ) {
            let (s, c) = (rot.sin(), rot.cos());
            let moved = |u: f64, v: f64| (c * u - s * v + tx, s * u + c * v + ty);
            let p = Person::new(1, x, y, th).unwrap();
            let (mx, my) = moved(x, y);
            let q = Person::new(1, mx, my, th + rot).unwrap();
            let expected = {
                let m = transactional_center(&p, d);
                moved(m.u, m.v)
            };
            let got = transactional_center(&q, d);
            prop_assert!((got.u - expected.0).abs() < 1e-8);
            prop_assert!((got.v - expected.1).abs() < 1e-8);
        }

        #[test]
        fn theta_always_in_range(th in -1e6..1e6f64) {
            let t = Person::new(1, 0.0, 0.0, th).unwrap().theta();
            prop_assert!((0.0..TAU).contains(&t));
        }
    }
}
