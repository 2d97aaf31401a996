//! Synthetic annotated scenes, Gaussian perturbation and noise sweeps.
//!
//! Every group arrangement places its members on a circle of radius
//! `spacing` around the anchor (the o-space centre), each facing the anchor,
//! so with `spacing == stride_d` all members' transactional centres coincide
//! at the anchor. The kinds differ in the angular positions of the members:
//!
//! | kind           | members | angular offsets          |
//! |----------------|---------|--------------------------|
//! | vis-a-vis      | 2       | 0, π                     |
//! | L-shape        | 2       | 0, π/2                   |
//! | side-by-side   | 2       | −π/6, π/6 (abreast)      |
//! | circular(n)    | n       | 2πk/n                    |
//!
//! Offsets are measured from the direction `orientation + π`, so a
//! vis-a-vis pair with orientation 0 has its first member on the −x side
//! facing +x.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI, TAU};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Error, Result};
use crate::geometry::{distance, Point};
use crate::math;
use crate::metrics::{aggregate_counts, MatchCounts};
use crate::model::{Group, GroupSet, Params, Person, PersonId, Scene};
use crate::solver::detect_groups;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrangementKind {
    VisAVis,
    LShape,
    SideBySide,
    Circular(usize),
    Singleton,
}

impl ArrangementKind {
    pub fn members(&self) -> usize {
        match self {
            Self::VisAVis | Self::LShape | Self::SideBySide => 2,
            Self::Circular(n) => *n,
            Self::Singleton => 1,
        }
    }

    fn offsets(&self) -> Vec<f64> {
        match *self {
            Self::VisAVis => alloc::vec![0.0, PI],
            Self::LShape => alloc::vec![0.0, FRAC_PI_2],
            Self::SideBySide => alloc::vec![-FRAC_PI_6, FRAC_PI_6],
            Self::Circular(n) => (0..n).map(|k| TAU * k as f64 / n as f64).collect(),
            Self::Singleton => alloc::vec![0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrangementSpec {
    pub kind: ArrangementKind,
    pub anchor: Point,
    /// Rotation of the layout; the facing direction for a lone singleton.
    pub orientation: f64,
    /// Radius of the member circle. `None` uses the stride.
    pub spacing: Option<f64>,
}

impl ArrangementSpec {
    pub fn new(kind: ArrangementKind, anchor: Point, orientation: f64) -> Self {
        Self {
            kind,
            anchor,
            orientation,
            spacing: None,
        }
    }

    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing = Some(spacing);
        self
    }

    fn radius(&self, params: &Params) -> f64 {
        self.spacing.unwrap_or(params.stride_d)
    }

    /// Radius of the disc around the anchor holding the members and their
    /// transactional centres.
    fn footprint(&self, params: &Params) -> f64 {
        match self.kind {
            ArrangementKind::Singleton => params.stride_d,
            _ => self.radius(params).max(params.stride_d),
        }
    }

    fn validate(&self, params: &Params) -> Result<()> {
        if let ArrangementKind::Circular(n) = self.kind {
            if !(3..=10).contains(&n) {
                return Err(invalid(format!("circular arrangement of {n}; need 3 to 10")));
            }
        }
        let r = self.radius(params);
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("spacing must be positive"));
        }
        if !(self.anchor.is_finite() && self.orientation.is_finite()) {
            return Err(invalid("arrangement anchor and orientation must be finite"));
        }
        Ok(())
    }
}

/// Lays out the arrangements as one annotated scene. Person ids run from 1
/// in arrangement order. Singletons face directly away from the nearest
/// other anchor.
pub fn generate_scene(frame_id: impl Into<String>, specs: &[ArrangementSpec], params: &Params) -> Result<Scene> {
    params.validate()?;
    for s in specs {
        s.validate(params)?;
    }
    let mut conflicts = Vec::new();
    for a in 0..specs.len() {
        for b in a + 1..specs.len() {
            let gap = distance(specs[a].anchor, specs[b].anchor);
            if gap < specs[a].footprint(params) + specs[b].footprint(params) {
                conflicts.push((a, b));
            }
        }
    }
    if !conflicts.is_empty() {
        return Err(Error::OverlappingArrangements(conflicts));
    }

    let mut persons = Vec::new();
    let mut groups = Vec::new();
    let mut next_id = 1u64;
    for (k, spec) in specs.iter().enumerate() {
        if spec.kind == ArrangementKind::Singleton {
            let theta = facing_away(k, specs).unwrap_or(spec.orientation);
            persons.push(Person::new(next_id, spec.anchor.u, spec.anchor.v, theta)?);
            next_id += 1;
            continue;
        }
        let r = spec.radius(params);
        let mut members = Vec::new();
        for offset in spec.kind.offsets() {
            let phi = spec.orientation + PI + offset;
            let x = spec.anchor.u + r * math::cos(phi);
            let y = spec.anchor.v + r * math::sin(phi);
            persons.push(Person::new(next_id, x, y, phi + PI)?);
            members.push(PersonId(next_id));
            next_id += 1;
        }
        groups.push(Group::new(members)?);
    }
    Scene::new(frame_id, persons)?.with_ground_truth(GroupSet::new(groups)?)
}

fn facing_away(k: usize, specs: &[ArrangementSpec]) -> Option<f64> {
    let here = specs[k].anchor;
    let c = specs
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, s)| s.anchor)
        .min_by(|a, b| distance(*a, here).total_cmp(&distance(*b, here)))?;
    let (du, dv) = (specs[k].anchor.u - c.u, specs[k].anchor.v - c.v);
    (du != 0.0 || dv != 0.0).then(|| math::atan2(dv, du))
}

/// Random layout on a 3×3 grid of cells: 2 to 4 groups (pairs in any of
/// the three arrangements, or circles of 3) and 1 to 4 individuals outside
/// any group, each with a random orientation and a jittered anchor. About
/// half of the lone individuals stand as bystanders three radii from a
/// group's centre, facing away from it; the rest get a cell of their own.
pub fn random_layout<R: Rng + ?Sized>(rng: &mut R, params: &Params) -> Vec<ArrangementSpec> {
    const KINDS: [ArrangementKind; 4] = [
        ArrangementKind::VisAVis,
        ArrangementKind::LShape,
        ArrangementKind::SideBySide,
        ArrangementKind::Circular(3),
    ];
    let groups = rng.random_range(2..=4usize);
    let singletons = rng.random_range(1..=4usize);
    let cell = 2.0 * params.stride_d + 3.0 * params.sigma;
    let jitter = 0.25 * params.sigma;
    let mut cells: Vec<usize> = (0..9).collect();
    cells.shuffle(rng);
    let mut cells = cells.into_iter();
    let cell_anchor = |rng: &mut R, c: usize| {
        Point::new(
            (c % 3) as f64 * cell + rng.random_range(-jitter..=jitter),
            (c / 3) as f64 * cell + rng.random_range(-jitter..=jitter),
        )
    };

    let mut specs = Vec::with_capacity(groups + singletons);
    for _ in 0..groups {
        let kind = KINDS[rng.random_range(0..KINDS.len())];
        let anchor = cell_anchor(rng, cells.next().expect("nine cells"));
        specs.push(ArrangementSpec::new(kind, anchor, rng.random_range(0.0..TAU)));
    }
    for k in 0..singletons {
        let orientation = rng.random_range(0.0..TAU);
        if k < groups && rng.random_bool(0.5) {
            let host = specs[k].anchor;
            let reach = 3.0 * params.stride_d;
            let phi = rng.random_range(0.0..TAU);
            let anchor = Point::new(host.u + reach * math::cos(phi), host.v + reach * math::sin(phi));
            let candidate = ArrangementSpec::new(ArrangementKind::Singleton, anchor, orientation);
            let clear = specs
                .iter()
                .all(|s| distance(s.anchor, anchor) >= s.footprint(params) + candidate.footprint(params));
            if clear {
                specs.push(candidate);
                continue;
            }
        }
        let anchor = cell_anchor(rng, cells.next().expect("nine cells"));
        specs.push(ArrangementSpec::new(ArrangementKind::Singleton, anchor, orientation));
    }
    specs
}

/// `count` random annotated scenes, frame ids `0..count`, reproducible from `seed`.
pub fn synthetic_scenes(count: usize, seed: u64, params: &Params) -> Result<Vec<Scene>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| generate_scene(format!("{k}"), &random_layout(&mut rng, params), params))
        .collect()
}

/// `n` persons placed uniformly in the square `[0, extent]²` with uniform
/// orientations, ids `1..=n`, no ground truth.
pub fn uniform_scene<R: Rng + ?Sized>(
    rng: &mut R,
    frame_id: impl Into<String>,
    n: usize,
    extent: f64,
) -> Result<Scene> {
    let persons = (1..=n as u64)
        .map(|id| {
            Person::new(
                id,
                rng.random_range(0.0..=extent),
                rng.random_range(0.0..=extent),
                rng.random_range(0.0..TAU),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Scene::new(frame_id, persons)
}

/// Eleven persons: a vis-a-vis pair (1, 2), an L-shaped pair (3, 4), a
/// side-by-side pair (5, 6), a circle of three (7, 8, 9), an outsider (10)
/// standing behind person 7 facing the circle's centre at two and a half
/// strides, and a lone individual (11). The outsider's line of sight to the
/// circle's centre passes through person 7, so only the visibility penalty
/// keeps them out of the circle. Ground truth excludes the outsider.
pub fn blocked_outsider_scene(params: &Params) -> Result<Scene> {
    let d = params.stride_d;
    let far = 10.0 * d;
    let specs = [
        ArrangementSpec::new(ArrangementKind::VisAVis, Point::new(0.0, 0.0), 0.0),
        ArrangementSpec::new(ArrangementKind::LShape, Point::new(far, 0.0), 0.0),
        ArrangementSpec::new(ArrangementKind::SideBySide, Point::new(2.0 * far, 0.0), FRAC_PI_2),
        // first member sits straight below the centre
        ArrangementSpec::new(ArrangementKind::Circular(3), Point::new(0.0, far), FRAC_PI_2),
        ArrangementSpec::new(ArrangementKind::Singleton, Point::new(far, far), 0.0),
    ];
    let base = generate_scene("blocked-outsider", &specs, params)?;
    let mut persons: Vec<Person> = base.persons()[..9].to_vec();
    persons.push(Person::new(10, 0.0, far - 2.5 * d, FRAC_PI_2)?);
    let lone = base.persons()[9];
    persons.push(Person::new(11, lone.x, lone.y, lone.theta())?);
    let gt = base.ground_truth().cloned().unwrap_or_default();
    Scene::new("blocked-outsider", persons)?.with_ground_truth(gt)
}

/// Per-level Gaussian noise. At level `L` the standard deviations are
/// `L·sigma_x`, `L·sigma_y` and `L·sigma_theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub sigma_theta: f64,
    pub level: u32,
    pub seed: u64,
}

impl Default for NoiseSpec {
    /// 20 length units per level on each axis and 0.1 rad on orientation.
    fn default() -> Self {
        Self {
            sigma_x: 20.0,
            sigma_y: 20.0,
            sigma_theta: 0.1,
            level: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    PositionOnly,
    OrientationOnly,
    Both,
}

impl NoiseSpec {
    pub fn with_mode(mut self, mode: NoiseMode) -> Self {
        match mode {
            NoiseMode::PositionOnly => self.sigma_theta = 0.0,
            NoiseMode::OrientationOnly => {
                self.sigma_x = 0.0;
                self.sigma_y = 0.0;
            }
            NoiseMode::Both => {}
        }
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = |s: f64| s.is_finite() && s >= 0.0;
        if ok(self.sigma_x) && ok(self.sigma_y) && ok(self.sigma_theta) {
            Ok(())
        } else {
            Err(invalid("noise deviations must be finite and non-negative"))
        }
    }
}

/// Perturbs every person's `x`, `y` and `theta` with independent zero-mean
/// Gaussians. Ids and ground truth are untouched; level 0 is the identity.
/// The three draws per person are taken in every mode, so modes sharing a
/// seed share their noise realisations.
pub fn add_noise(scene: &Scene, spec: &NoiseSpec) -> Result<Scene> {
    spec.validate()?;
    if spec.level == 0 {
        return Ok(scene.clone());
    }
    let level = spec.level as f64;
    let normal = |s: f64| Normal::new(0.0, level * s).map_err(|_| invalid("bad noise deviation"));
    let (nx, ny, nt) = (normal(spec.sigma_x)?, normal(spec.sigma_y)?, normal(spec.sigma_theta)?);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let persons = scene
        .persons()
        .iter()
        .map(|p| {
            let (dx, dy, dt) = (nx.sample(&mut rng), ny.sample(&mut rng), nt.sample(&mut rng));
            Person::new(p.id, p.x + dx, p.y + dy, p.theta() + dt)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(scene.with_persons(persons))
}

/// Seed for one `(scene, level)` cell of a sweep.
pub fn derive_seed(base: u64, scene: usize, level: u32) -> u64 {
    splitmix64(splitmix64(base ^ (scene as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)) ^ level as u64)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub level: u32,
    pub counts: MatchCounts,
    pub f1: f64,
}

/// Detection F1 at tolerance `t` for each noise level, perturbing per
/// `mode`. Scenes must carry ground truth.
pub fn noise_sweep(
    scenes: &[Scene],
    params: &Params,
    template: &NoiseSpec,
    levels: &[u32],
    mode: NoiseMode,
    t: f64,
) -> Result<Vec<SweepPoint>> {
    if scenes.iter().any(|s| s.ground_truth().is_none()) {
        return Err(invalid("noise sweep needs ground truth on every scene"));
    }
    let noise = template.with_mode(mode);
    levels
        .iter()
        .map(|&level| {
            let mut frames = Vec::with_capacity(scenes.len());
            for (k, scene) in scenes.iter().enumerate() {
                let spec = NoiseSpec {
                    level,
                    seed: derive_seed(template.seed, k, level),
                    ..noise
                };
                let noisy = add_noise(scene, &spec)?;
                let det = detect_groups(&noisy, params)?.groups;
                frames.push((scene.ground_truth().cloned().unwrap_or_default(), det));
            }
            let counts = aggregate_counts(&frames, t)?;
            Ok(SweepPoint {
                level,
                counts,
                f1: counts.scores().f1,
            })
        })
        .collect()
}
