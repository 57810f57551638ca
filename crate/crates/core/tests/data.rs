use nwtopo::dataset::{generate_dataset, two_blobs_labeled, DatasetKind, TwoBlobs};
use nwtopo::{load_points, save_points, Error, PointCloud, RngSeed};
use proptest::prelude::*;

#[test]
fn zero_noise_circle_points_are_unit() {
    let c = generate_dataset(&DatasetKind::NoisyCircle, 4, 0.0, RngSeed(3)).unwrap();
    assert_eq!((c.len(), c.dim()), (4, 2));
    for p in c.points() {
        assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn uniform_square_support() {
    let c = generate_dataset(&DatasetKind::UniformSquare, 1000, 0.0, RngSeed(1)).unwrap();
    assert!(c.as_flat().iter().all(|x| (-1.0..=1.0).contains(x)));
}

#[test]
fn two_blobs_split_is_binomial() {
    let (c, labels) = two_blobs_labeled(&TwoBlobs::default(), 1000, RngSeed(5)).unwrap();
    assert_eq!(c.len(), 1000);
    let minority = labels.iter().filter(|&&l| l == 1).count() as f64;
    let sd = (1000.0f64 * 0.15 * 0.85).sqrt();
    assert!((minority - 150.0).abs() <= 3.0 * sd, "{minority}");
    let same = generate_dataset(&DatasetKind::TwoBlobs(TwoBlobs::default()), 1000, 0.0, RngSeed(5)).unwrap();
    assert_eq!(same, c);
}

#[test]
fn generator_errors() {
    assert!(generate_dataset(&DatasetKind::UniformSquare, 0, 0.0, RngSeed(0)).is_err());
    assert!(DatasetKind::parse("torus", None).is_err());
    assert!(DatasetKind::parse("from-file", None).is_err());
}

#[test]
fn same_seed_same_cloud() {
    for kind in [DatasetKind::NoisyCircle, DatasetKind::UniformSquare] {
        let a = generate_dataset(&kind, 200, 0.1, RngSeed(9)).unwrap();
        let b = generate_dataset(&kind, 200, 0.1, RngSeed(9)).unwrap();
        let c = generate_dataset(&kind, 200, 0.1, RngSeed(10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}

#[test]
fn csv_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let c = PointCloud::from_points(&[[0.1, 1.0 / 3.0], [-2.5e-300, 7.0], [1e17, -0.0]]).unwrap();
    save_points(&c, &path).unwrap();
    assert_eq!(load_points(&path).unwrap(), c);

    let one = dir.path().join("one.csv");
    std::fs::write(&one, "0.5,0.5\n").unwrap();
    let c = load_points(&one).unwrap();
    assert_eq!((c.len(), c.dim()), (1, 2));

    let ragged = dir.path().join("r.csv");
    std::fs::write(&ragged, "1,2\n3,4,5\n").unwrap();
    assert!(matches!(load_points(&ragged), Err(Error::RaggedRow { row: 2, .. })));

    let text = dir.path().join("t.csv");
    std::fs::write(&text, "1,2\n3,x\n").unwrap();
    assert!(matches!(load_points(&text), Err(Error::NonNumeric { .. })));

    let empty = dir.path().join("e.csv");
    std::fs::write(&empty, "").unwrap();
    assert!(matches!(load_points(&empty), Err(Error::EmptyFile(_))));

    let nan = dir.path().join("n.csv");
    std::fs::write(&nan, "1,NaN\n").unwrap();
    assert!(load_points(&nan).is_err());
}

#[test]
fn cloud_rejects_bad_input() {
    assert!(PointCloud::from_flat(2, vec![]).is_err());
    assert!(PointCloud::from_flat(2, vec![1.0, 2.0, 3.0]).is_err());
    assert!(PointCloud::from_flat(0, vec![1.0]).is_err());
    assert!(matches!(
        PointCloud::from_flat(2, vec![0.0, f64::INFINITY]),
        Err(Error::NonFinite { point: 0, axis: 1 })
    ));
}

proptest! {
    #[test]
    fn save_load_is_identity(dim in 1usize..5, coords in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..60)) {
        let n = coords.len() / dim;
        prop_assume!(n >= 1);
        let cloud = PointCloud::from_flat(dim, coords[..n * dim].to_vec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        save_points(&cloud, &path).unwrap();
        let back = load_points(&path).unwrap();
        prop_assert_eq!(back.as_flat().iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
                        cloud.as_flat().iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn generators_emit_finite_points(n in 1usize..300, noise in 0.0f64..5.0, seed in any::<u64>()) {
        for kind in [DatasetKind::NoisyCircle, DatasetKind::UniformSquare, DatasetKind::TwoBlobs(TwoBlobs::default())] {
            let c = generate_dataset(&kind, n, noise, RngSeed(seed)).unwrap();
            prop_assert_eq!(c.len(), n);
            prop_assert!(c.all_finite());
        }
    }
}
