mod common;

use common::{standard_scene, v};
use nalgebra::DMatrix;
use rand::Rng;
use schottky_lab::equivariant::{
    equivariance_samples, BaseStrategy, BoundaryCorrespondence, BoundaryMap, DirectionTable, EquivariantMap,
    LambdaMap, SurveyGrid,
};
use schottky_lab::moebius::apply_word;
use schottky_lab::sampling::unit_directions;
use schottky_lab::schottky::UnfoldStatus;
use schottky_lab::{chordal_distance, ExtendedPoint, SchottkySet, Sphere, Vector};

fn far_inversion() -> Vec<Sphere> {
    vec![Sphere::round(v(&[4.0, 3.0]), 2.5).unwrap()]
}

/// Identity on the standard scene with table boundary maps and the pairing
/// rotated by one.
fn mismatched_scene() -> EquivariantMap {
    let set = standard_scene();
    let maps = (0..3).map(|_| BoundaryMap::Table(DirectionTable::from_fn(2, 1024, |w| w.clone()))).collect();
    let corr = BoundaryCorrespondence::new(set.clone(), set, vec![1, 2, 0], maps).unwrap();
    EquivariantMap::new(corr, LambdaMap::Identity)
}

#[test]
fn extension_of_a_restricted_moebius_map_reproduces_it() {
    let mut rng = common::rng(2024);
    for scene in 0..10 {
        let set = common::random_scene(&mut rng, 3 + scene % 2);
        let g = common::random_moebius_for(&mut rng, &set, 3);
        let em = EquivariantMap::from_moebius(set.clone(), &g).unwrap();
        let mut worst = 0.0f64;
        for p in SurveyGrid::around(&set, 0.25, 64).points() {
            let x = ExtendedPoint::Finite(p);
            let got = em.evaluate(&x).unwrap();
            worst = worst.max(chordal_distance(&got, &apply_word(&g, &x).unwrap()));
        }
        assert!(worst <= 1e-8, "scene {scene}: worst chordal error {worst:e}");
    }
}

#[test]
fn moebius_boundary_data_is_equivariant() {
    let mut rng = common::rng(99);
    for _ in 0..4 {
        let set = common::random_scene(&mut rng, 3);
        let g = common::random_moebius_for(&mut rng, &set, 3);
        let em = EquivariantMap::from_moebius(set.clone(), &g).unwrap();
        let samples = equivariance_samples(&set, 50, 50);
        assert_eq!(samples.len(), 200);
        for i in 0..set.len() {
            let check = em.check_equivariance(i, &samples).unwrap();
            assert_eq!(check.failures, 0);
            assert!(check.max_residual <= 1e-8, "generator {i}: {:e}", check.max_residual);
        }
    }
}

/// Samples inside depth-`d` orbit balls, which unfold past a budget of `d − 1`.
fn deep_samples(set: &SchottkySet, d: usize, count: usize) -> Vec<Vector> {
    let packing = set.orbit_packing(d).unwrap();
    let mut rng = common::rng(5);
    packing
        .at_depth(d)
        .take(count)
        .map(|b| {
            let (c, r) = b.ball.bounded().unwrap();
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            c + v(&[a.cos(), a.sin()]) * (r * rng.gen_range(0.1..0.9))
        })
        .collect()
}

#[test]
fn radial_base_extension_is_equivariant_at_depth_capped_points() {
    let set = standard_scene();
    let em = EquivariantMap::from_moebius(set.clone(), &far_inversion())
        .unwrap()
        .with_strategy(BaseStrategy::Radial)
        .with_max_depth(6);
    let samples = deep_samples(&set, 7, 200);
    for x in &samples {
        let ev = em.evaluate_detailed(&ExtendedPoint::Finite(x.clone())).unwrap();
        assert!(matches!(ev.status, UnfoldStatus::DepthCapped { .. }));
    }
    for i in 0..3 {
        let check = em.check_equivariance(i, &samples).unwrap();
        assert!(check.max_residual <= 1e-6, "generator {i}: {:e}", check.max_residual);
    }
}

#[test]
fn identity_extension_has_zero_residual() {
    let set = standard_scene();
    let em = EquivariantMap::identity(set.clone());
    let samples = equivariance_samples(&set, 50, 50);
    for i in 0..3 {
        assert!(em.check_equivariance(i, &samples).unwrap().max_residual <= 1e-14);
    }
}

#[test]
fn mismatched_pairing_is_detected() {
    let em = mismatched_scene();
    let samples = equivariance_samples(em.correspondence.source(), 50, 50);
    let worst = (0..3).map(|i| em.check_equivariance(i, &samples).unwrap().max_residual).fold(0.0, f64::max);
    assert!(worst >= 0.1, "residual {worst}");
}

#[test]
fn values_are_continuous_across_peripheral_spheres() {
    let set = standard_scene();
    let ems = [
        EquivariantMap::from_moebius(set.clone(), &far_inversion()).unwrap(),
        EquivariantMap::from_moebius(set.clone(), &far_inversion()).unwrap().with_strategy(BaseStrategy::Radial),
    ];
    for em in &ems {
        for i in 0..3 {
            let (c, r) = (set.center(i), set.radius(i));
            for w in unit_directions(2, 64) {
                let inner = ExtendedPoint::Finite(c + &w * (r - 1e-6));
                let outer = ExtendedPoint::Finite(c + &w * (r + 1e-6));
                let a = em.evaluate(&inner).unwrap().into_finite().unwrap();
                let b = em.evaluate(&outer).unwrap().into_finite().unwrap();
                assert!((a - b).norm() <= 1e-5);
            }
        }
    }
}

#[test]
fn raising_the_depth_keeps_terminated_values() {
    let set = standard_scene();
    let shallow = EquivariantMap::from_moebius(set.clone(), &far_inversion()).unwrap().with_max_depth(4);
    let deep = shallow.clone().with_max_depth(12);
    for p in SurveyGrid::around(&set, 0.1, 40).points() {
        let x = ExtendedPoint::Finite(p);
        let a = shallow.evaluate_detailed(&x).unwrap();
        if a.status == UnfoldStatus::LandedInComplement {
            let b = deep.evaluate_detailed(&x).unwrap();
            assert!(chordal_distance(&a.value, &b.value) <= 1e-12);
        }
    }
}

#[test]
fn moebius_extension_is_conformal_on_a_survey() {
    let set = standard_scene();
    let em = EquivariantMap::from_moebius(set.clone(), &far_inversion()).unwrap();
    let report = em.dilatation_survey(&SurveyGrid::around(&set, 0.1, 16), &[1e-3, 1e-4], &unit_directions(2, 64));
    assert_eq!(report.points.iter().filter(|p| p.error.is_some()).count(), 0);
    let max_h = report.max_h.unwrap();
    assert!((1.0..=1.0 + 1e-3).contains(&max_h), "max H {max_h}");
}

#[test]
fn identity_survey_is_exactly_conformal() {
    let set = standard_scene();
    let em = EquivariantMap::identity(set.clone());
    let report = em.dilatation_survey(&SurveyGrid::around(&set, 0.1, 8), &[1e-2, 1e-4], &unit_directions(2, 64));
    assert!((report.max_h.unwrap() - 1.0).abs() <= 1e-9);
    assert!((report.min_h.unwrap() - 1.0).abs() <= 1e-9);
}

#[test]
fn stretched_boundary_data_gives_median_dilatation_two() {
    let set = standard_scene();
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
    let target = SchottkySet::from_disks(
        &(0..3)
            .map(|i| ((&a * set.center(i)).iter().copied().collect(), set.radius(i) * 2f64.sqrt()))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let maps = (0..3)
        .map(|_| {
            let a = a.clone();
            BoundaryMap::Table(DirectionTable::from_fn(2, 1024, move |w| &a * w))
        })
        .collect();
    let corr = BoundaryCorrespondence::new(set.clone(), target, vec![0, 1, 2], maps).unwrap();
    let em = EquivariantMap::new(corr, LambdaMap::Affine { matrix: a, offset: Vector::zeros(2) })
        .with_strategy(BaseStrategy::Radial);
    let report = em.dilatation_survey(&SurveyGrid::around(&set, 0.1, 24), &[1e-4], &unit_directions(2, 256));
    let median = report.median_h.unwrap();
    assert!((median - 2.0).abs() <= 0.1, "median H {median}");
}
