use std::f64::consts::{FRAC_PI_2, PI};

use gcff_core::synth::{self, ArrangementKind, ArrangementSpec};
use gcff_core::{
    brute_force_detect, detect_groups, total_cost, update_centers, Assignment, GroupSet, Params, Person, PersonId,
    Point, Scene,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ids(groups: &GroupSet) -> Vec<Vec<u64>> {
    groups
        .iter()
        .map(|g| g.members().iter().map(|m| m.0).collect())
        .collect()
}

fn synthetic() -> Params {
    Params::new(30.0, 80.0)
}

fn small_scenes(count: usize, seed: u64) -> Vec<Scene> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let n = rng.random_range(1..=7);
            synth::uniform_scene(&mut rng, format!("{k}"), n, 200.0).unwrap()
        })
        .collect()
}

#[test]
fn blocked_outsider_is_kept_out_by_visibility() {
    let params = synthetic();
    let scene = synth::blocked_outsider_scene(&params).unwrap();
    assert_eq!(scene.len(), 11);

    let with = detect_groups(&scene, &params).unwrap();
    assert_eq!(
        ids(&with.groups),
        vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8, 9]]
    );
    assert_eq!(Some(&with.groups), scene.ground_truth());

    let without = detect_groups(&scene, &params.without_visibility()).unwrap();
    assert_eq!(
        ids(&without.groups),
        vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![7, 8, 9, 10]]
    );
}

#[test]
fn canonical_arrangements_are_recovered() {
    let params = synthetic();
    let kinds = [
        ArrangementKind::VisAVis,
        ArrangementKind::LShape,
        ArrangementKind::SideBySide,
        ArrangementKind::Circular(3),
        ArrangementKind::Circular(4),
        ArrangementKind::Circular(6),
        ArrangementKind::Circular(10),
    ];
    for (k, kind) in kinds.into_iter().enumerate() {
        let specs = [
            ArrangementSpec::new(kind, Point::new(0.0, 0.0), 0.3 * k as f64),
            ArrangementSpec::new(ArrangementKind::Singleton, Point::new(400.0, 0.0), 0.0),
        ];
        let scene = synth::generate_scene("arrangement", &specs, &params).unwrap();
        let det = detect_groups(&scene, &params).unwrap();
        assert_eq!(Some(&det.groups), scene.ground_truth(), "{kind:?}");
    }
}

#[test]
fn generated_scenes_match_ground_truth_and_oracle() {
    let params = synthetic();
    for scene in synth::synthetic_scenes(30, 11, &params).unwrap() {
        let det = detect_groups(&scene, &params).unwrap();
        assert_eq!(Some(&det.groups), scene.ground_truth(), "frame {}", scene.frame_id);
        if scene.len() <= 8 {
            let (oracle, cost) = brute_force_detect(&scene, &params).unwrap();
            assert_eq!(oracle, det.groups, "frame {}", scene.frame_id);
            assert!(det.cost >= cost - 1e-9 * cost);
        }
    }
}

#[test]
fn traces_are_monotone_and_converge() {
    let params = synthetic();
    let mut scenes = small_scenes(100, 3);
    scenes.extend(synth::synthetic_scenes(30, 5, &params).unwrap());
    for scene in &scenes {
        for p in [params, params.without_visibility()] {
            let det = detect_groups(scene, &p).unwrap();
            assert!(det.trace.is_monotone(), "frame {}", scene.frame_id);
            assert!(det.trace.converged);
            assert!(det.trace.iterations <= p.max_iterations);
            assert_eq!(det.trace.costs.last().copied(), Some(det.cost));
            let recomputed = total_cost(scene, &det.assignment, &p).unwrap();
            assert_eq!(recomputed, det.cost);
        }
    }
}

#[test]
fn local_optimum_never_beats_the_oracle() {
    let params = synthetic().without_visibility();
    let scenes = small_scenes(200, 17);
    let mut equal = 0;
    for scene in &scenes {
        let det = detect_groups(scene, &params).unwrap();
        let (_, best) = brute_force_detect(scene, &params).unwrap();
        let rel = (det.cost - best) / best;
        assert!(rel >= -1e-9, "frame {}: {} < {}", scene.frame_id, det.cost, best);
        assert!(rel <= 0.05, "frame {}: gap {rel}", scene.frame_id);
        if rel <= 1e-6 {
            equal += 1;
        }
    }
    assert!(equal >= 190, "{equal} of 200");
}

#[test]
fn oracle_bounds_detected_partition_at_block_means() {
    let params = synthetic();
    for scene in small_scenes(60, 23) {
        let det = detect_groups(&scene, &params).unwrap();
        let at_means = Assignment {
            label_of: det.assignment.label_of.clone(),
            centers: update_centers(&scene, &det.assignment, &params),
        };
        let (_, best) = brute_force_detect(&scene, &params).unwrap();
        assert!(total_cost(&scene, &at_means, &params).unwrap() >= best * (1.0 - 1e-9));
    }
}

fn transformed(scene: &Scene, f: impl Fn(&Person) -> (f64, f64, f64)) -> Scene {
    let persons = scene
        .persons()
        .iter()
        .map(|p| {
            let (x, y, t) = f(p);
            Person::new(p.id, x, y, t).unwrap()
        })
        .collect();
    Scene::new(scene.frame_id.clone(), persons).unwrap()
}

#[test]
fn partition_is_invariant_under_rigid_motion() {
    let params = synthetic();
    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    for scene in small_scenes(50, 29) {
        let base = detect_groups(&scene, &params).unwrap().groups;
        let moved = transformed(&scene, |p| {
            (c * p.x - s * p.y + 120.0, s * p.x + c * p.y - 45.0, p.theta() + 0.7)
        });
        assert_eq!(
            detect_groups(&moved, &params).unwrap().groups,
            base,
            "frame {}",
            scene.frame_id
        );
        let mirrored_turn = transformed(&scene, |p| (-p.x, -p.y, p.theta() + PI));
        assert_eq!(detect_groups(&mirrored_turn, &params).unwrap().groups, base);
    }
}

#[test]
fn partition_is_invariant_under_scaling() {
    for s in [2.0, 0.5, 3.0] {
        let params = synthetic();
        let scaled_params = Params::new(params.stride_d * s, params.sigma * s);
        for scene in small_scenes(50, 31) {
            let base = detect_groups(&scene, &params).unwrap();
            let scaled = transformed(&scene, |p| (p.x * s, p.y * s, p.theta()));
            let det = detect_groups(&scaled, &scaled_params).unwrap();
            assert_eq!(det.groups, base.groups, "scale {s}, frame {}", scene.frame_id);
            approx::assert_relative_eq!(det.cost, base.cost * s * s, max_relative = 1e-9);
        }
    }
}

#[test]
fn partition_is_invariant_under_permutation() {
    let params = synthetic();
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for scene in small_scenes(50, 37) {
        let base = detect_groups(&scene, &params).unwrap().groups;
        let mut persons = scene.persons().to_vec();
        persons.reverse();
        let reversed = Scene::new("r", persons.clone()).unwrap();
        assert_eq!(detect_groups(&reversed, &params).unwrap().groups, base);

        rand::seq::SliceRandom::shuffle(persons.as_mut_slice(), &mut rng);
        let relabel = |id: PersonId| PersonId(1000 - id.0);
        let renamed: Vec<Person> = persons
            .iter()
            .map(|p| Person::new(relabel(p.id), p.x, p.y, p.theta()).unwrap())
            .collect();
        let renamed = Scene::new("s", renamed).unwrap();
        let expected = GroupSet::from_clusters(
            base.iter()
                .map(|g| g.members().iter().map(|&m| relabel(m)).collect::<Vec<_>>()),
        )
        .unwrap();
        assert_eq!(detect_groups(&renamed, &params).unwrap().groups, expected);
    }
}

fn label_count(groups: &GroupSet, n: usize) -> usize {
    let grouped: usize = groups.iter().map(|g| g.len()).sum();
    groups.len() + n - grouped
}

#[test]
fn heavier_label_cost_never_adds_labels_at_the_optimum() {
    let base = synthetic().without_visibility();
    let weights = [100.0, 1_000.0, 3_000.0, 6_400.0, 12_000.0, 40_000.0];
    for scene in small_scenes(40, 41) {
        let mut last = usize::MAX;
        for w in weights {
            let params = Params { mdl_weight: w, ..base };
            let (groups, _) = brute_force_detect(&scene, &params).unwrap();
            let labels = label_count(&groups, scene.len());
            assert!(labels <= last, "frame {}: {labels} > {last} at {w}", scene.frame_id);
            last = labels;
        }
    }
}

#[test]
fn heavier_label_cost_trends_towards_fewer_labels() {
    let base = synthetic();
    let weights = [100.0, 1_000.0, 3_000.0, 6_400.0, 12_000.0, 40_000.0];
    let scenes = small_scenes(60, 43);
    let totals: Vec<usize> = weights
        .iter()
        .map(|&w| {
            let params = Params { mdl_weight: w, ..base };
            scenes
                .iter()
                .map(|s| label_count(&detect_groups(s, &params).unwrap().groups, s.len()))
                .sum()
        })
        .collect();
    assert!(totals.windows(2).all(|w| w[1] <= w[0]), "{totals:?}");
    assert!(totals[0] > totals[totals.len() - 1]);
}

#[test]
fn detection_is_deterministic() {
    let params = synthetic();
    for scene in synth::synthetic_scenes(10, 47, &params).unwrap() {
        let a = detect_groups(&scene, &params).unwrap();
        let b = detect_groups(&scene, &params).unwrap();
        assert_eq!(a.groups, b.groups);
        assert_eq!(a.cost.to_bits(), b.cost.to_bits());
        assert_eq!(a.trace.costs, b.trace.costs);
    }
}

#[test]
fn facing_pair_needs_visibility_free_line() {
    let params = synthetic();
    let pair = Scene::new(
        "pair",
        vec![
            Person::new(1, 0.0, 0.0, 0.0).unwrap(),
            Person::new(2, 60.0, 0.0, PI).unwrap(),
            Person::new(3, 30.0, 300.0, FRAC_PI_2).unwrap(),
        ],
    )
    .unwrap();
    let det = detect_groups(&pair, &params).unwrap();
    assert_eq!(ids(&det.groups), vec![vec![1, 2]]);
    approx::assert_relative_eq!(det.cost, 2.0 * params.mdl_weight);
}
