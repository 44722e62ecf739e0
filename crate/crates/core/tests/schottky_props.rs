mod common;

use std::collections::HashMap;

use common::{standard_scene, symmetric_scene};
use proptest::prelude::*;
use schottky_lab::schottky::{enumerate_words, UnfoldStatus};
use schottky_lab::{chordal_distance, ExtendedPoint, ReflectionWord, SchottkyError, SchottkySet};

/// Counts reduced words by brute force over all `m^k` sequences.
fn brute_force_count(m: usize, k: usize) -> usize {
    (0..m.pow(k as u32))
        .filter(|&code| {
            let mut rest = code;
            let mut prev = usize::MAX;
            for _ in 0..k {
                let l = rest % m;
                if l == prev {
                    return false;
                }
                prev = l;
                rest /= m;
            }
            true
        })
        .count()
}

#[test]
fn word_counts_match_closed_form_and_brute_force() {
    for m in 2..=5usize {
        let mut counts = [0usize; 9];
        for w in enumerate_words(m, 8) {
            counts[w.len()] += 1;
        }
        assert_eq!(counts[0], 1);
        for (k, &count) in counts.iter().enumerate().skip(1) {
            let closed = m * (m - 1).pow(k as u32 - 1);
            assert_eq!(count, closed, "m={m} k={k}");
            if m.pow(k as u32) <= 400_000 {
                assert_eq!(count, brute_force_count(m, k), "m={m} k={k}");
            }
        }
    }
}

#[test]
fn enumeration_is_strictly_increasing() {
    let words: Vec<ReflectionWord> = enumerate_words(3, 5).collect();
    for pair in words.windows(2) {
        let key = |w: &ReflectionWord| (w.len(), w.letters().to_vec());
        assert!(key(&pair[0]) < key(&pair[1]));
    }
}

#[test]
fn symmetric_scene_orbit_has_45_balls_at_depth_3() {
    let packing = symmetric_scene().orbit_packing(3).unwrap();
    assert_eq!(packing.balls.len(), 45);
    let per_depth: Vec<usize> = (0..=3).map(|d| packing.at_depth(d).count()).collect();
    assert_eq!(per_depth, vec![3, 6, 12, 24]);
}

#[test]
fn orbit_balls_nest_inside_parents() {
    for set in [standard_scene(), symmetric_scene()] {
        let packing = set.orbit_packing(5).unwrap();
        let index: HashMap<(ReflectionWord, usize), usize> =
            packing.balls.iter().enumerate().map(|(k, b)| ((b.word.clone(), b.source), k)).collect();
        for b in packing.balls.iter().filter(|b| b.depth() > 0) {
            let parent = &packing.balls[index[&b.parent_key().unwrap()]];
            let (c, r) = b.ball.bounded().unwrap();
            let (pc, pr) = parent.ball.bounded().unwrap();
            assert!((c - pc).norm() + r < pr, "{:?} escapes its parent", b.word);
        }
    }
}

#[test]
fn orbit_balls_at_equal_depth_are_disjoint() {
    let packing = standard_scene().orbit_packing(4).unwrap();
    for d in 0..=4 {
        let layer: Vec<_> = packing.at_depth(d).map(|b| b.ball.bounded().unwrap()).collect();
        for i in 0..layer.len() {
            for j in i + 1..layer.len() {
                assert!((layer[i].0 - layer[j].0).norm() > layer[i].1 + layer[j].1);
            }
        }
    }
}

#[test]
fn max_radius_decays_geometrically() {
    let packing = standard_scene().orbit_packing(8).unwrap();
    let radii = &packing.max_radius_by_depth;
    for w in radii.windows(2) {
        assert!(w[1] < w[0]);
    }
    // each reflection contracts by at most (0.2 / 0.8)^2 ⋅ (1 + small)
    assert!(radii[8] < radii[0] * 0.1f64.powi(8) * 10.0, "{radii:?}");
}

#[test]
fn doubling_is_symmetric_under_the_reflection() {
    let set = standard_scene();
    for i in 0..3 {
        let doubled = set.double(i).unwrap();
        assert_eq!(doubled.len(), 4);
        let mirror = set.mirror(i).unwrap();
        for b in doubled.balls() {
            let image = b.image_under(mirror).unwrap();
            let (c, r) = image.bounded().unwrap();
            let matched = doubled.balls().iter().any(|o| {
                let (oc, or) = o.bounded().unwrap();
                (c - oc).norm() < 1e-12 && (r - or).abs() < 1e-12
            });
            assert!(matched, "reflection of a doubled ball is not in the doubled set");
        }
    }
}

#[test]
fn too_few_balls_are_rejected() {
    let err = SchottkySet::from_disks(&[(vec![0.0, 0.0], 0.2), (vec![1.0, 0.0], 0.2)]).unwrap_err();
    assert!(err.to_string().contains("at least three"), "{err}");
}

#[test]
fn overlaps_name_the_pair() {
    let err = SchottkySet::from_disks(&[(vec![0.0, 0.0], 0.6), (vec![1.0, 0.0], 0.6), (vec![0.0, 3.0], 0.2)]).unwrap_err();
    let SchottkyError::Invalid(report) = err else { panic!("expected a validation failure") };
    assert!(!report.is_valid());
    assert_eq!(report.min_gap_pair, Some((0, 1)));
}

#[test]
fn unfolding_stops_at_the_depth_cap() {
    let set = standard_scene();
    let packing = set.orbit_packing(6).unwrap();
    let deep = packing.at_depth(6).next().unwrap();
    let x = ExtendedPoint::Finite(deep.center().unwrap().clone());
    let capped = set.unfold(&x, 3).unwrap();
    assert_eq!(capped.word.len(), 3);
    assert!(matches!(capped.status, UnfoldStatus::DepthCapped { .. }));
    let full = set.unfold(&x, 20).unwrap();
    assert!(full.word.len() >= 7);
    assert_eq!(&full.word.letters()[..3], capped.word.letters());
}

proptest! {
    #[test]
    fn unfold_round_trip(x in -0.5..1.5f64, y in -0.5..1.5f64) {
        let set = standard_scene();
        let p = ExtendedPoint::from_slice(&[x, y]);
        let u = match set.unfold(&p, 30) {
            Ok(u) => u,
            Err(SchottkyError::CenterHit { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        if u.landed() {
            prop_assert!(set.contains(&u.terminal));
        }
        let back = set.apply(&u.word, &u.terminal).unwrap();
        prop_assert!(chordal_distance(&back, &p) <= 1e-9);
    }

    #[test]
    fn word_reduction_is_idempotent(letters in prop::collection::vec(0usize..4, 0..20)) {
        let w = ReflectionWord::reduce(&letters);
        prop_assert!(w.letters().windows(2).all(|p| p[0] != p[1]));
        prop_assert_eq!(ReflectionWord::reduce(w.letters()), w.clone());
        prop_assert_eq!(w.concat(&w.inverse()), ReflectionWord::empty());
    }

    #[test]
    fn word_action_matches_letters(letters in prop::collection::vec(0usize..3, 0..6), x in -1.0..2.0f64, y in -1.0..2.0f64) {
        let set = standard_scene();
        let w = ReflectionWord::reduce(&letters);
        let p = ExtendedPoint::from_slice(&[x, y]);
        let mut expected = p.clone();
        for &j in w.letters().iter().rev() {
            expected = set.mirrors()[j].invert(&expected).unwrap();
        }
        let got = set.apply(&w, &p).unwrap();
        prop_assert!(chordal_distance(&got, &expected) == 0.0);
        // the inverse word expands by up to (r/d)^{-2} per letter, so the
        // round trip is checked on the contracting side
        let back = set.apply(&w.inverse(), &got).unwrap();
        let again = set.apply(&w, &back).unwrap();
        prop_assert!(chordal_distance(&again, &got) <= 1e-12);
    }
}
