use gcff_core::synth::{self, NoiseMode, NoiseSpec};
use gcff_core::{transactional_center, Params};

#[test]
fn generated_sets_have_the_intended_statistics() {
    let params = Params::new(30.0, 80.0);
    let scenes = synth::synthetic_scenes(100, 2024, &params).unwrap();
    let persons: usize = scenes.iter().map(|s| s.len()).sum();
    let groups: usize = scenes.iter().map(|s| s.ground_truth().unwrap().len()).sum();
    let (persons, groups) = (persons as f64 / 100.0, groups as f64 / 100.0);
    assert!((8.0..=10.0).contains(&persons), "{persons}");
    assert!((2.5..=3.5).contains(&groups), "{groups}");
    for scene in &scenes {
        for group in scene.ground_truth().unwrap().iter() {
            assert!((2..=3).contains(&group.len()));
            let centres: Vec<_> = group
                .members()
                .iter()
                .map(|&id| transactional_center(&scene.persons()[scene.index_of(id).unwrap()], params.stride_d))
                .collect();
            for c in &centres[1..] {
                assert!(gcff_core::distance(*c, centres[0]) < 1e-9);
            }
        }
    }
}

#[test]
fn same_seed_same_scenes() {
    let params = Params::new(30.0, 80.0);
    assert_eq!(
        synth::synthetic_scenes(20, 9, &params).unwrap(),
        synth::synthetic_scenes(20, 9, &params).unwrap()
    );
    assert_ne!(
        synth::synthetic_scenes(20, 9, &params).unwrap(),
        synth::synthetic_scenes(20, 10, &params).unwrap()
    );
}

#[test]
fn noise_keeps_identity_and_ground_truth() {
    let params = Params::new(30.0, 80.0);
    let scene = &synth::synthetic_scenes(1, 4, &params).unwrap()[0];
    for mode in [NoiseMode::PositionOnly, NoiseMode::OrientationOnly, NoiseMode::Both] {
        let spec = NoiseSpec {
            level: 3,
            seed: 1,
            ..NoiseSpec::default()
        }
        .with_mode(mode);
        let noisy = synth::add_noise(scene, &spec).unwrap();
        assert_eq!(noisy.ground_truth(), scene.ground_truth());
        for (a, b) in scene.persons().iter().zip(noisy.persons()) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.x == b.x && a.y == b.y, mode == NoiseMode::OrientationOnly);
            assert_eq!(a.theta() == b.theta(), mode == NoiseMode::PositionOnly);
            assert!((0.0..std::f64::consts::TAU).contains(&b.theta()));
        }
    }
}

#[test]
fn sweep_starts_at_the_noiseless_score() {
    let params = Params::new(30.0, 80.0);
    let scenes = synth::synthetic_scenes(20, 6, &params).unwrap();
    let sweep = synth::noise_sweep(
        &scenes,
        &params,
        &NoiseSpec::default(),
        &[0, 5],
        NoiseMode::Both,
        2.0 / 3.0,
    )
    .unwrap();
    let frames: Vec<_> = scenes
        .iter()
        .map(|s| {
            (
                s.ground_truth().unwrap().clone(),
                gcff_core::detect_groups(s, &params).unwrap().groups,
            )
        })
        .collect();
    let noiseless = gcff_core::metrics::aggregate_counts(&frames, 2.0 / 3.0).unwrap();
    assert_eq!(sweep[0].counts, noiseless);
    assert_eq!(sweep[0].f1, noiseless.scores().f1);
    assert!(sweep[1].f1 < sweep[0].f1);
}
