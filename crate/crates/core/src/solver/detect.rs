use alloc::vec::Vec;

use crate::error::Result;
use crate::geometry::Point;
use crate::model::{transactional_center, GroupSet, Params, Proposals, Scene};

use super::{assign_labels, total_cost, Assignment};

/// A step must lower the objective by more than this to count as progress.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;

/// Objective after initialisation and after every accepted step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveTrace {
    pub costs: Vec<f64>,
    /// Assignment steps run, including the final one that made no progress.
    pub iterations: usize,
    /// `false` only when `max_iterations` cut the run short.
    pub converged: bool,
}

impl SolveTrace {
    pub fn is_monotone(&self) -> bool {
        self.costs.windows(2).all(|w| w[1] <= w[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub groups: GroupSet,
    pub assignment: Assignment,
    pub cost: f64,
    pub trace: SolveTrace,
}

/// Moves every occupied centre to the mean of its members' transactional
/// centres. Unoccupied centres are dropped.
pub fn update_centers(scene: &Scene, asg: &Assignment, params: &Params) -> Vec<Point> {
    let persons = scene.persons();
    asg.clusters()
        .iter()
        .filter_map(|members| {
            Point::mean(
                members
                    .iter()
                    .map(|&i| transactional_center(&persons[i], params.stride_d))
                    .collect::<Vec<_>>()
                    .iter(),
            )
        })
        .collect()
}

/// Finds F-formations by alternating assignment and centre updates.
///
/// Every person starts on its own transactional centre. Each step offers
/// the assignment solver every active group's current centre and the mean
/// of its members' transactional centres, warm-started from the current
/// labelling. With [`Proposals::Neighbourhood`] the pool also keeps every
/// person's own transactional centre and the means of each group with one
/// person added or removed and of each pair of groups merged, so a person
/// can switch groups and both groups re-centre in a single step. The run
/// stops when a step fails to lower the objective by more than [`CONVERGENCE_TOLERANCE`] or after `max_iterations` steps.
pub fn detect_groups(scene: &Scene, params: &Params) -> Result<Detection> {
    params.validate()?;
    if scene.is_empty() {
        return Ok(Detection {
            groups: GroupSet::empty(),
            assignment: Assignment::singletons(Vec::new()),
            cost: 0.0,
            trace: SolveTrace {
                costs: Vec::new(),
                iterations: 0,
                converged: true,
            },
        });
    }

    let mu: Vec<Point> = scene
        .persons()
        .iter()
        .map(|p| transactional_center(p, params.stride_d))
        .collect();
    let mut current = Assignment::singletons(mu.clone());
    let mut cost = total_cost(scene, &current, params)?;
    let mut trace = SolveTrace {
        costs: alloc::vec![cost],
        iterations: 0,
        converged: false,
    };

    while trace.iterations < params.max_iterations {
        trace.iterations += 1;
        let proposals = match params.proposals {
            Proposals::PerGroup => update_centers(scene, &current, params),
            Proposals::Neighbourhood => {
                let mut p = update_centers(scene, &current, params);
                p.extend(mu.iter().copied());
                p.extend(neighbourhood_means(&current, &mu));
                p
            }
        };
        let (pool, warm) = proposal_pool(&current, proposals);
        let next = assign_labels(scene, &pool, Some(&warm), params)?;
        let next_cost = total_cost(scene, &next, params)?;
        if next_cost < cost - CONVERGENCE_TOLERANCE {
            current = next;
            cost = next_cost;
            trace.costs.push(cost);
        } else {
            trace.converged = true;
            break;
        }
    }

    Ok(Detection {
        groups: current.group_set(scene),
        assignment: current,
        cost,
        trace,
    })
}

/// Means of each group with one person added or removed, and of each pair
/// of groups merged.
fn neighbourhood_means(current: &Assignment, mu: &[Point]) -> Vec<Point> {
    let clusters: Vec<Vec<usize>> = current.clusters().into_iter().filter(|c| !c.is_empty()).collect();
    let mean_of = |members: &mut dyn Iterator<Item = usize>| {
        let mut sum = (0.0, 0.0, 0usize);
        for i in members {
            sum = (sum.0 + mu[i].u, sum.1 + mu[i].v, sum.2 + 1);
        }
        (sum.2 > 0).then(|| Point::new(sum.0 / sum.2 as f64, sum.1 / sum.2 as f64))
    };
    let mut out = Vec::new();
    for c in &clusters {
        for i in 0..mu.len() {
            let m = if c.contains(&i) {
                if c.len() < 2 {
                    continue;
                }
                mean_of(&mut c.iter().copied().filter(|&j| j != i))
            } else {
                mean_of(&mut c.iter().copied().chain(core::iter::once(i)))
            };
            out.extend(m);
        }
    }
    for (a, ca) in clusters.iter().enumerate() {
        for cb in &clusters[a + 1..] {
            out.extend(mean_of(&mut ca.iter().chain(cb).copied()));
        }
    }
    out
}

/// Current centres followed by the new means, without exact duplicates.
/// Returns the pool and the current labelling expressed in pool indices.
fn proposal_pool(current: &Assignment, means: Vec<Point>) -> (Vec<Point>, Vec<usize>) {
    let mut pool: Vec<Point> = Vec::with_capacity(current.centers.len() + means.len());
    let slot = |p: Point, pool: &mut Vec<Point>| match pool.iter().position(|q| *q == p) {
        Some(k) => k,
        None => {
            pool.push(p);
            pool.len() - 1
        }
    };
    let remap: Vec<usize> = current.centers.iter().map(|&c| slot(c, &mut pool)).collect();
    for m in means {
        slot(m, &mut pool);
    }
    let warm = current.label_of.iter().map(|&l| remap[l]).collect();
    (pool, warm)
}
