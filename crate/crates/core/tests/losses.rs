mod common;

use common::*;
use nwtopo::dataset::{generate_dataset, DatasetKind};
use nwtopo::losses::{
    box_penalty, loss_diagram_gradient, loss_value, selected_pairs, topological_loss, total_loss_and_sparse_gradient,
    LossKind, LossSpec, PersistenceOptions,
};
use nwtopo::persistence::{PersistencePair, SparseGradient};
use nwtopo::subsample::{random_slice, SubsampleIndices};
use nwtopo::{PointCloud, RngSeed};
use proptest::prelude::*;

const SQRT2: f64 = std::f64::consts::SQRT_2;
const KINDS: [LossKind; 5] = [
    LossKind::Simplification,
    LossKind::Augmentation,
    LossKind::Collapser,
    LossKind::Maxpers2d,
    LossKind::Bunny,
];

fn pair(dim: usize, birth: f64, death: f64) -> PersistencePair {
    PersistencePair {
        dim,
        birth,
        death,
        birth_edge: Some((0, 1)),
        death_edge: death.is_finite().then_some((0, 2)),
        birth_simplex: vec![0, 1],
        death_simplex: death.is_finite().then(|| vec![0, 1, 2]),
    }
}

fn with_k(kind: LossKind, k: usize) -> LossSpec {
    LossSpec { k, ..LossSpec::preset(kind) }
}

#[test]
fn closed_form_examples() {
    let square = [pair(1, 1.0, SQRT2)];
    let collapser = loss_value(&square, &LossSpec::new(LossKind::Collapser, 1));
    assert!((collapser - (1.0 + SQRT2).powi(2)).abs() < 1e-12);
    assert!((collapser - 5.8284).abs() < 1e-4);
    let aug = loss_value(&square, &LossSpec::new(LossKind::Augmentation, 1));
    assert!((aug + ((SQRT2 - 1.0) / 2.0).powi(2)).abs() < 1e-15);
    assert!((aug + 0.042893).abs() < 1e-6);

    for kind in KINDS {
        let spec = with_k(kind, 1);
        assert_eq!(loss_value(&[], &spec), 0.0);
        assert!(loss_diagram_gradient(&[], &spec).is_empty());
    }
}

#[test]
fn diagram_gradients_match_finite_differences() {
    let mut r = rng(4);
    use rand::Rng;
    for kind in KINDS {
        let spec = with_k(kind, 1);
        for _ in 0..50 {
            let mut pairs: Vec<PersistencePair> = (0..6)
                .map(|_| {
                    let b: f64 = r.random_range(0.0..1.0);
                    pair(1, b, b + r.random_range(0.01..1.0))
                })
                .collect();
            pairs.push(pair(1, 0.3, f64::INFINITY));
            pairs.push(pair(0, 0.0, 0.7));
            let grads = loss_diagram_gradient(&pairs, &spec);
            let h = 1e-6;
            for a in 0..pairs.len() {
                for which in 0..2 {
                    let eval = |delta: f64| {
                        let mut p = pairs.clone();
                        if which == 0 {
                            p[a].birth += delta;
                        } else {
                            p[a].death += delta;
                        }
                        loss_value(&p, &spec)
                    };
                    let fd = (eval(h) - eval(-h)) / (2.0 * h);
                    let an = if which == 0 { grads[a].0 } else { grads[a].1 };
                    let scale = an.abs().max(1.0);
                    assert!((fd - an).abs() / scale < 1e-8, "{kind:?} pair {a}: {fd} vs {an}");
                }
            }
        }
    }
}

#[test]
fn augmentation_is_minus_quarter_simplification() {
    let mut r = rng(9);
    for _ in 0..20 {
        let cloud = random_cloud(&mut r, 12, 2, 1.0);
        let pairs = nwtopo::persistence::diagram(&cloud, 1, f64::INFINITY, 1_000_000).unwrap();
        let simp = loss_value(&pairs, &LossSpec::new(LossKind::Simplification, 1));
        let aug = loss_value(&pairs, &LossSpec::new(LossKind::Augmentation, 1));
        assert!((aug + simp / 4.0).abs() < 1e-15 * simp.max(1.0));
    }
}

#[test]
fn top_m_selection_and_exclusions() {
    let pairs = vec![
        pair(1, 0.1, 0.5),
        pair(1, 0.2, 0.9),
        pair(1, 0.0, 0.4),
        pair(1, 0.3, 0.3),
        pair(1, 0.2, f64::INFINITY),
        pair(0, 0.0, 2.0),
    ];
    let all = selected_pairs(&pairs, &LossSpec::new(LossKind::Simplification, 1));
    assert_eq!(all.len(), 3);
    let spec = LossSpec {
        top_m: Some(2),
        ..LossSpec::new(LossKind::Simplification, 1)
    };
    let mut top = selected_pairs(&pairs, &spec);
    top.sort();
    // Persistences 0.4, 0.7, 0.4: the tie at 0.4 goes to the smaller birth.
    assert_eq!(top, vec![1, 2]);
    let grads = loss_diagram_gradient(&pairs, &spec);
    assert_eq!(grads[0], (0.0, 0.0));
    assert_eq!(grads[4], (0.0, 0.0));
    assert!(LossSpec { top_m: Some(0), ..spec }.validate().is_err());
}

#[test]
fn box_penalty_examples() {
    let c = PointCloud::from_points(&[[1.5, 0.0, 0.0]]).unwrap();
    let (v, g) = box_penalty(&c, 1.0, 1.0).unwrap();
    assert!((v - 0.5).abs() < 1e-15);
    assert_eq!(g.get(0).unwrap(), &[1.0, 0.0, 0.0]);

    let c = PointCloud::from_points(&[[-1.2, 1.2]]).unwrap();
    let (v, g) = box_penalty(&c, 1.0, 1.0).unwrap();
    assert!((v - 0.2).abs() < 1e-15);
    assert_eq!(g.get(0).unwrap(), &[-1.0, 0.0]);

    let c = PointCloud::from_points(&[[0.5, -0.9], [1.0, 0.0]]).unwrap();
    let (v, g) = box_penalty(&c, 1.0, 1.0).unwrap();
    assert_eq!(v, 0.0);
    assert!(g.is_empty());

    let c = PointCloud::from_points(&[[0.0, -3.0]]).unwrap();
    let (v, g) = box_penalty(&c, 1.0, 2.5).unwrap();
    assert!((v - 5.0).abs() < 1e-15);
    assert_eq!(g.get(0).unwrap(), &[0.0, -2.5]);
}

#[test]
fn unit_square_total_loss() {
    let cloud = PointCloud::from_points(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let spec = LossSpec::new(LossKind::Augmentation, 1);
    let eval =
        total_loss_and_sparse_gradient(&cloud, &SubsampleIndices::full(4), &spec, PersistenceOptions::default()).unwrap();
    assert!((eval.value + 0.042893).abs() < 1e-6);
    // The birth side and the death diagonal share one corner, so exactly
    // three corners carry gradient.
    let live: Vec<_> = eval.pairs.iter().filter(|p| !p.is_zero_persistence()).collect();
    assert_eq!(live.len(), 1);
    let (a, b) = live[0].birth_edge.unwrap();
    let (c, d) = live[0].death_edge.unwrap();
    let mut expected = vec![a, b, c, d];
    expected.sort();
    expected.dedup();
    assert_eq!(expected.len(), 3);
    let anchors: Vec<usize> = eval.gradient.anchors().collect();
    assert_eq!(anchors, expected);
}

#[test]
fn zero_persistence_only_gives_empty_gradient() {
    let h = 3f64.sqrt() / 2.0;
    let cloud = PointCloud::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
    let spec = LossSpec::new(LossKind::Simplification, 1);
    let eval =
        total_loss_and_sparse_gradient(&cloud, &SubsampleIndices::full(3), &spec, PersistenceOptions::default()).unwrap();
    assert_eq!(eval.value, 0.0);
    assert!(eval.gradient.is_empty());
}

#[test]
fn subsample_gradient_lands_on_global_indices() {
    let cloud = PointCloud::from_points(&[[9.0, 9.0], [0.0, 0.0], [8.0, 8.0], [0.0, 4.0], [3.0, 0.0]]).unwrap();
    let sub = SubsampleIndices {
        indices: vec![1, 3, 4],
        direction: None,
    };
    let spec = LossSpec::new(LossKind::Simplification, 0);
    let (value, gradient, _) = topological_loss(&cloud, &sub, &spec, PersistenceOptions::default()).unwrap();
    let anchors: Vec<usize> = gradient.anchors().collect();
    assert_eq!(anchors, vec![1, 3, 4]);
    // H0 deaths 3 and 4: sum pers^2 = 25.
    assert!((value - 25.0).abs() < 1e-12);
    let g4 = gradient.get(4).unwrap();
    // d(3^2)/dx_4 = 2 * 3 * (x_4 - x_1) / 3.
    assert!((g4[0] - 6.0).abs() < 1e-12 && g4[1].abs() < 1e-12);
}

#[test]
fn box_penalty_covers_the_whole_cloud() {
    let cloud = PointCloud::from_points(&[[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [3.0, 0.0]]).unwrap();
    let sub = SubsampleIndices {
        indices: vec![0, 1, 2],
        direction: None,
    };
    let spec = LossSpec::preset(LossKind::Maxpers2d);
    let eval = total_loss_and_sparse_gradient(&cloud, &sub, &spec, PersistenceOptions::default()).unwrap();
    assert!((eval.value - eval.topological - 2.0).abs() < 1e-15);
    assert_eq!(eval.gradient.get(3).unwrap(), &[1.0, 0.0]);
}

#[test]
fn anchor_sparsity_on_noisy_circle() {
    let spec = LossSpec::new(LossKind::Collapser, 1);
    let mut counts = Vec::new();
    for seed in 0..20u64 {
        let cloud = generate_dataset(&DatasetKind::NoisyCircle, 1000, 0.1, RngSeed(seed)).unwrap();
        let sub = random_slice(&cloud, 100, &mut rng(seed)).unwrap();
        let eval = total_loss_and_sparse_gradient(&cloud, &sub, &spec, PersistenceOptions::default()).unwrap();
        assert!(eval.value > 0.0);
        assert!(eval.gradient.len() <= 100);
        assert!(eval.gradient.anchors().all(|i| sub.indices.contains(&i)));
        counts.push(eval.gradient.len());
    }
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    eprintln!("anchor counts {counts:?}, mean {mean}");
    assert!(mean < 50.0);
}

#[test]
fn sparse_gradient_never_stores_zero_vectors() {
    let mut g = SparseGradient::new(2);
    g.accumulate(3, 1.0, &[1.0, 0.0]);
    g.accumulate(3, -1.0, &[1.0, 0.0]);
    g.accumulate(5, 2.0, &[0.0, 1.0]);
    g.prune();
    assert_eq!(g.anchors().collect::<Vec<_>>(), vec![5]);
}

proptest! {
    #[test]
    fn box_penalty_is_nonnegative_and_sparse(coords in prop::collection::vec(-2.0f64..2.0, 2..40), bound in 0.1f64..1.5) {
        let n = coords.len() / 2;
        let cloud = PointCloud::from_flat(2, coords[..2 * n].to_vec()).unwrap();
        let (v, g) = box_penalty(&cloud, bound, 1.0).unwrap();
        prop_assert!(v >= 0.0);
        for (i, gi) in g.iter() {
            let p = cloud.point(i);
            prop_assert!(p[0].abs().max(p[1].abs()) > bound);
            prop_assert_eq!(gi.iter().filter(|c| **c != 0.0).count(), 1);
        }
        let expected: f64 = cloud.points().map(|p| (p[0].abs().max(p[1].abs()) - bound).max(0.0)).sum();
        prop_assert!((v - expected).abs() < 1e-12);
    }
}
