use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geometry::Point;
use crate::model::{Params, Scene};

use super::cost::unary_cost;
use super::Assignment;

/// Pools of at most this many candidate centres are solved exactly by
/// enumerating every subset of active centres.
pub const EXACT_LABEL_LIMIT: usize = 12;

/// Scenes of at most this many persons are solved exactly over any pool
/// size by dynamic programming over subsets of persons.
pub const EXACT_PERSON_LIMIT: usize = 14;

/// Node budget for the branch-and-bound search on larger pools.
const SEARCH_BUDGET: usize = 5_000;

/// Assigns every person to one of `candidates`, minimising unary costs plus
/// `mdl_weight` per centre used.
///
/// `warm_start`, when given, holds a candidate index per person; the result
/// never costs more than it. Pools up to [`EXACT_LABEL_LIMIT`] and scenes up
/// to [`EXACT_PERSON_LIMIT`] persons are solved exactly; otherwise expansion
/// and deletion moves from the warm start are followed by a budgeted
/// branch-and-bound search. Equal-cost choices go to the lower candidate index. Unused
/// candidates are dropped from the returned assignment.
pub fn assign_labels(
    scene: &Scene,
    candidates: &[Point],
    warm_start: Option<&[usize]>,
    params: &Params,
) -> Result<Assignment> {
    params.validate()?;
    if candidates.is_empty() {
        return Err(invalid("no candidate centres"));
    }
    if let Some(w) = warm_start {
        if w.len() != scene.len() || w.iter().any(|&l| l >= candidates.len()) {
            return Err(invalid("warm start does not index the candidate list"));
        }
    }
    let problem = LabelCostProblem::build(scene, candidates, params);
    let labels = if candidates.len() <= EXACT_LABEL_LIMIT {
        problem.exact()
    } else if scene.len() <= EXACT_PERSON_LIMIT {
        problem.partition_dp()
    } else {
        let start = problem.local_search(warm_start);
        problem.branch_and_bound(start, SEARCH_BUDGET)
    };
    let mut asg = Assignment {
        label_of: labels,
        centers: candidates.to_vec(),
    };
    asg.compact();
    Ok(asg)
}

/// Uncapacitated facility location: `unary[i * labels + l]` is the cost of
/// person `i` on label `l`, each opened label costs `label_cost`.
#[derive(Debug)]
pub(crate) struct LabelCostProblem {
    persons: usize,
    labels: usize,
    unary: Vec<f64>,
    label_cost: f64,
}

impl LabelCostProblem {
    fn build(scene: &Scene, candidates: &[Point], params: &Params) -> Self {
        let labels = candidates.len();
        let mut unary = Vec::with_capacity(scene.len() * labels);
        for i in 0..scene.len() {
            for &c in candidates {
                unary.push(unary_cost(scene, i, c, params));
            }
        }
        Self {
            persons: scene.len(),
            labels,
            unary,
            label_cost: params.mdl_weight,
        }
    }

    #[cfg(test)]
    pub(crate) fn from_matrix(persons: usize, labels: usize, unary: Vec<f64>, label_cost: f64) -> Self {
        assert_eq!(unary.len(), persons * labels);
        Self {
            persons,
            labels,
            unary,
            label_cost,
        }
    }

    #[inline]
    fn cost(&self, i: usize, l: usize) -> f64 {
        self.unary[i * self.labels + l]
    }

    pub(crate) fn energy(&self, labels: &[usize]) -> f64 {
        let mut used = alloc::vec![false; self.labels];
        let mut e = 0.0;
        for (i, &l) in labels.iter().enumerate() {
            e += self.cost(i, l);
            used[l] = true;
        }
        e + self.label_cost * used.iter().filter(|&&u| u).count() as f64
    }

    /// Best label per person restricted to the labels set in `mask`.
    fn best_within(order: &[Vec<usize>], mask: u32) -> impl Iterator<Item = usize> + '_ {
        order
            .iter()
            .map(move |o| *o.iter().find(|&&l| mask & (1 << l) != 0).expect("mask is non-empty"))
    }

    pub(crate) fn exact(&self) -> Vec<usize> {
        debug_assert!(self.labels <= EXACT_LABEL_LIMIT);
        if self.persons == 0 {
            return Vec::new();
        }
        // per person, labels by ascending cost; the stable sort keeps the
        // lower index first on ties
        let order: Vec<Vec<usize>> = (0..self.persons)
            .map(|i| {
                let mut o: Vec<usize> = (0..self.labels).collect();
                o.sort_by(|&a, &b| self.cost(i, a).total_cmp(&self.cost(i, b)));
                o
            })
            .collect();
        let mut best_mask = 0u32;
        let mut best = f64::INFINITY;
        for mask in 1u32..(1u32 << self.labels) {
            let open = mask.count_ones() as f64 * self.label_cost;
            if open >= best {
                continue;
            }
            let mut e = open;
            for (i, l) in Self::best_within(&order, mask).enumerate() {
                e += self.cost(i, l);
                if e >= best {
                    break;
                }
            }
            if e < best {
                best = e;
                best_mask = mask;
            }
        }
        Self::best_within(&order, best_mask).collect()
    }

    pub(crate) fn local_search(&self, warm_start: Option<&[usize]>) -> Vec<usize> {
        let mut labels = match warm_start {
            Some(w) => w.to_vec(),
            None => self.best_single_label(),
        };
        let mut members = alloc::vec![0usize; self.labels];
        for &l in &labels {
            members[l] += 1;
        }
        let tol = |e: f64| 1e-12 * (1.0 + e.abs());
        loop {
            let mut improved = false;
            for alpha in 0..self.labels {
                let e = self.energy(&labels);
                let (gain, evacuate) = self.expansion_gain(&labels, &members, alpha);
                if gain > tol(e) {
                    for (i, label) in labels.iter_mut().enumerate() {
                        let cur = *label;
                        if cur == alpha {
                            continue;
                        }
                        if evacuate[cur] || self.cost(i, alpha) < self.cost(i, cur) {
                            members[cur] -= 1;
                            members[alpha] += 1;
                            *label = alpha;
                        }
                    }
                    improved = true;
                }
            }
            for beta in 0..self.labels {
                if members[beta] == 0 {
                    continue;
                }
                let e = self.energy(&labels);
                if let Some((gain, moves)) = self.deletion_gain(&labels, &members, beta) {
                    if gain > tol(e) {
                        for (i, to) in moves {
                            labels[i] = to;
                            members[to] += 1;
                        }
                        members[beta] = 0;
                        improved = true;
                    }
                }
            }
            if !improved {
                return labels;
            }
        }
    }

    /// Exact optimum as a partition of the persons into blocks, each block
    /// paying one label cost plus its cheapest common label. Blocks sharing a
    /// label are never optimal since merging them saves a label cost.
    pub(crate) fn partition_dp(&self) -> Vec<usize> {
        let n = self.persons;
        debug_assert!(n <= EXACT_PERSON_LIMIT);
        let full = 1usize << n;
        let mut block_cost = alloc::vec![f64::INFINITY; full];
        let mut block_label = alloc::vec![0usize; full];
        let mut sums = alloc::vec![0.0f64; full];
        for l in 0..self.labels {
            for s in 1..full {
                let low = s.trailing_zeros() as usize;
                sums[s] = sums[s & (s - 1)] + self.cost(low, l);
                if sums[s] < block_cost[s] {
                    block_cost[s] = sums[s];
                    block_label[s] = l;
                }
            }
        }

        let mut best = alloc::vec![f64::INFINITY; full];
        let mut choice = alloc::vec![0usize; full];
        best[0] = 0.0;
        for s in 1..full {
            let low = s & s.wrapping_neg();
            let rest = s ^ low;
            let mut sub = rest;
            loop {
                let block = sub | low;
                let c = block_cost[block] + self.label_cost + best[s ^ block];
                if c < best[s] {
                    best[s] = c;
                    choice[s] = block;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }

        let mut labels = alloc::vec![0usize; n];
        let mut s = full - 1;
        while s != 0 {
            let block = choice[s];
            let l = block_label[block];
            for (i, slot) in labels.iter_mut().enumerate() {
                if block & (1 << i) != 0 {
                    *slot = l;
                }
            }
            s ^= block;
        }
        labels
    }

    /// Depth-first search over open/closed decisions per label, seeded with
    /// `incumbent`. The bound is the label cost already paid plus, per
    /// person, the cheapest label still reachable. Stops after `budget`
    /// nodes and returns the best labelling found; it is exact whenever the
    /// search completes.
    pub(crate) fn branch_and_bound(&self, incumbent: Vec<usize>, budget: usize) -> Vec<usize> {
        let n = self.persons;
        if n == 0 {
            return incumbent;
        }
        let mut in_incumbent = alloc::vec![false; self.labels];
        for &l in &incumbent {
            in_incumbent[l] = true;
        }
        let mut order: Vec<usize> = (0..self.labels).collect();
        order.sort_by_key(|&l| !in_incumbent[l]);

        // suffix[k * n + i]: cheapest label for person i among order[k..]
        let mut suffix = alloc::vec![f64::INFINITY; (self.labels + 1) * n];
        for k in (0..self.labels).rev() {
            for i in 0..n {
                suffix[k * n + i] = suffix[(k + 1) * n + i].min(self.cost(i, order[k]));
            }
        }

        let mut search = Search {
            problem: self,
            order: &order,
            suffix: &suffix,
            best_cost: self.energy(&incumbent),
            best_open: None,
            open: Vec::new(),
            nodes: 0,
            budget,
        };
        let root = alloc::vec![f64::INFINITY; n];
        search.visit(0, &root);

        match search.best_open {
            None => incumbent,
            Some(open) => (0..n)
                .map(|i| {
                    let mut best = open[0];
                    for &l in &open[1..] {
                        let (c, b) = (self.cost(i, l), self.cost(i, best));
                        if c < b || (c == b && l < best) {
                            best = l;
                        }
                    }
                    best
                })
                .collect(),
        }
    }

    fn best_single_label(&self) -> Vec<usize> {
        let mut best = (f64::INFINITY, 0);
        for l in 0..self.labels {
            let e: f64 = (0..self.persons).map(|i| self.cost(i, l)).sum();
            if e < best.0 {
                best = (e, l);
            }
        }
        alloc::vec![best.1; self.persons]
    }

    /// Optimal expansion of `alpha`: every other active label either sends
    /// its members that prefer `alpha`, or is emptied into `alpha` entirely
    /// (saving its label cost). Returns the energy decrease and which labels
    /// are emptied.
    fn expansion_gain(&self, labels: &[usize], members: &[usize], alpha: usize) -> (f64, Vec<bool>) {
        let mut keep = alloc::vec![0.0f64; self.labels];
        let mut all = alloc::vec![0.0f64; self.labels];
        for (i, &cur) in labels.iter().enumerate() {
            if cur == alpha {
                continue;
            }
            let delta = self.cost(i, cur) - self.cost(i, alpha);
            all[cur] += delta;
            if delta > 0.0 {
                keep[cur] += delta;
            }
        }
        let mut gain = 0.0;
        let mut evacuate = alloc::vec![false; self.labels];
        for beta in 0..self.labels {
            if beta == alpha || members[beta] == 0 {
                continue;
            }
            let emptied = all[beta] + self.label_cost;
            if emptied > keep[beta] {
                gain += emptied;
                evacuate[beta] = true;
            } else {
                gain += keep[beta];
            }
        }
        if members[alpha] == 0 {
            gain -= self.label_cost;
        }
        (gain, evacuate)
    }

    /// Closes `beta`, sending each member to its cheapest other open label.
    fn deletion_gain(&self, labels: &[usize], members: &[usize], beta: usize) -> Option<(f64, Vec<(usize, usize)>)> {
        let open: Vec<usize> = (0..self.labels).filter(|&l| l != beta && members[l] > 0).collect();
        if open.is_empty() {
            return None;
        }
        let mut gain = self.label_cost;
        let mut moves = Vec::new();
        for (i, &cur) in labels.iter().enumerate() {
            if cur != beta {
                continue;
            }
            let mut to = open[0];
            for &l in &open[1..] {
                if self.cost(i, l) < self.cost(i, to) {
                    to = l;
                }
            }
            gain -= self.cost(i, to) - self.cost(i, beta);
            moves.push((i, to));
        }
        Some((gain, moves))
    }
}

struct Search<'a> {
    problem: &'a LabelCostProblem,
    order: &'a [usize],
    suffix: &'a [f64],
    best_cost: f64,
    best_open: Option<Vec<usize>>,
    open: Vec<usize>,
    nodes: usize,
    budget: usize,
}

impl Search<'_> {
    fn visit(&mut self, depth: usize, reach: &[f64]) {
        if self.nodes >= self.budget {
            return;
        }
        self.nodes += 1;
        let n = reach.len();
        let paid = self.open.len() as f64 * self.problem.label_cost;
        let tail = &self.suffix[depth * n..(depth + 1) * n];
        let bound: f64 = paid + reach.iter().zip(tail).map(|(r, s)| r.min(*s)).sum::<f64>();
        if bound >= self.best_cost {
            return;
        }
        if depth == self.order.len() {
            // bound is exact here; an infinite reach means nothing is open
            if bound.is_finite() {
                self.best_cost = bound;
                self.best_open = Some(self.open.clone());
            }
            return;
        }
        let l = self.order[depth];
        let opened: Vec<f64> = reach
            .iter()
            .enumerate()
            .map(|(i, r)| r.min(self.problem.cost(i, l)))
            .collect();
        if opened.iter().zip(reach).any(|(o, r)| o < r) {
            self.open.push(l);
            self.visit(depth + 1, &opened);
            self.open.pop();
        }
        self.visit(depth + 1, reach);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{transactional_center, Person};
    use crate::solver::total_cost;
    use alloc::vec;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    /// Independent oracle: every labelling in `labels^persons`.
    fn enumerate_all(p: &LabelCostProblem) -> f64 {
        let mut best = f64::INFINITY;
        let total = p.labels.pow(p.persons as u32);
        for code in 0..total {
            let mut c = code;
            let mut lab = Vec::with_capacity(p.persons);
            for _ in 0..p.persons {
                lab.push(c % p.labels);
                c /= p.labels;
            }
            best = best.min(p.energy(&lab));
        }
        best
    }

    fn person(id: u64, x: f64, y: f64, th: f64) -> Person {
        Person::new(id, x, y, th).unwrap()
    }

    #[test]
    fn facing_pair_shares_the_midpoint() {
        let params = Params::new(30.0, 80.0);
        let scene = Scene::new("f", vec![person(1, -30.0, 0.0, 0.0), person(2, 30.0, 0.0, PI)]).unwrap();
        let mu: Vec<Point> = scene.persons().iter().map(|p| transactional_center(p, 30.0)).collect();
        let candidates = [Point::new(0.0, 0.0), mu[0], mu[1]];
        let asg = assign_labels(&scene, &candidates, None, &params).unwrap();
        assert_eq!(asg.label_of, vec![0, 0]);
        assert_eq!(asg.centers, vec![Point::new(0.0, 0.0)]);

        let problem = LabelCostProblem::build(&scene, &candidates, &params);
        let oracle = enumerate_all(&problem);
        assert!((total_cost(&scene, &asg, &params).unwrap() - oracle).abs() < 1e-9);
    }

    #[test]
    fn distant_back_to_back_pair_stays_apart() {
        let params = Params::new(30.0, 80.0);
        // 10·D apart, each facing away from the other
        let scene = Scene::new("f", vec![person(1, -150.0, 0.0, PI), person(2, 150.0, 0.0, 0.0)]).unwrap();
        let mu: Vec<Point> = scene.persons().iter().map(|p| transactional_center(p, 30.0)).collect();
        let candidates = [Point::new(0.0, 0.0), mu[0], mu[1]];
        let asg = assign_labels(&scene, &candidates, None, &params).unwrap();
        assert_eq!(asg.centers, vec![mu[0], mu[1]]);
        assert_eq!(asg.label_of, vec![0, 1]);

        let problem = LabelCostProblem::build(&scene, &candidates, &params);
        let oracle = enumerate_all(&problem);
        assert!((total_cost(&scene, &asg, &params).unwrap() - oracle).abs() < 1e-9);
        assert_eq!(oracle, 2.0 * params.mdl_weight);
    }

    #[test]
    fn single_candidate() {
        let params = Params::new(30.0, 80.0);
        let scene = Scene::new("f", vec![person(1, 0.0, 0.0, 0.0)]).unwrap();
        let mu = transactional_center(&scene.persons()[0], 30.0);
        let asg = assign_labels(&scene, &[mu], None, &params).unwrap();
        assert_eq!(asg.label_of, vec![0]);
        assert_eq!(asg.centers, vec![mu]);
    }

    #[test]
    fn rejects_empty_pool_and_bad_warm_start() {
        let params = Params::new(30.0, 80.0);
        let scene = Scene::new("f", vec![person(1, 0.0, 0.0, 0.0)]).unwrap();
        assert!(assign_labels(&scene, &[], None, &params).is_err());
        let c = [Point::new(0.0, 0.0)];
        assert!(assign_labels(&scene, &c, Some(&[1]), &params).is_err());
        assert!(assign_labels(&scene, &c, Some(&[0, 0]), &params).is_err());
    }

    #[test]
    fn ties_go_to_the_lower_index() {
        let p = LabelCostProblem::from_matrix(2, 3, vec![1.0, 1.0, 1.0, 5.0, 1.0, 1.0], 0.5);
        assert_eq!(p.exact(), vec![1, 1]);
        let p = LabelCostProblem::from_matrix(1, 3, vec![2.0, 2.0, 2.0], 0.5);
        assert_eq!(p.exact(), vec![0]);
    }

    fn problem() -> impl Strategy<Value = LabelCostProblem> {
        (1usize..=5, 1usize..=5, 0.0..50.0f64).prop_flat_map(|(n, l, w)| {
            proptest::collection::vec(0.0..100.0f64, n * l).prop_map(move |u| LabelCostProblem::from_matrix(n, l, u, w))
        })
    }

    proptest! {
        #[test]
        fn exact_matches_enumeration(p in problem()) {
            let e = p.energy(&p.exact());
            let oracle = enumerate_all(&p);
            prop_assert!((e - oracle).abs() <= 1e-9 * (1.0 + oracle));
        }

        #[test]
        fn partition_dp_matches_enumeration(p in problem()) {
            let e = p.energy(&p.partition_dp());
            let oracle = enumerate_all(&p);
            prop_assert!((e - oracle).abs() <= 1e-9 * (1.0 + oracle));
        }

        #[test]
        fn unbounded_search_matches_enumeration(p in problem(), seed in 0usize..1000) {
            let warm: Vec<usize> = (0..p.persons).map(|i| (i * 7 + seed) % p.labels).collect();
            let e = p.energy(&p.branch_and_bound(warm, usize::MAX));
            let oracle = enumerate_all(&p);
            prop_assert!((e - oracle).abs() <= 1e-9 * (1.0 + oracle));
        }

        #[test]
        fn local_search_never_worsens_the_warm_start(p in problem(), seed in 0usize..1000) {
            let warm: Vec<usize> = (0..p.persons).map(|i| (i * 7 + seed) % p.labels).collect();
            let out = p.local_search(Some(&warm));
            prop_assert!(p.energy(&out) <= p.energy(&warm));
            prop_assert!(p.energy(&out) >= enumerate_all(&p) - 1e-9);
        }
    }
}
