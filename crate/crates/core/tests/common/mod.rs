#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schottky_lab::{Ball, SchottkySet, Sphere, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

/// Radius-0.2 disks at (0,0), (1,0), (0,1).
pub fn standard_scene() -> SchottkySet {
    SchottkySet::from_disks(&[(vec![0.0, 0.0], 0.2), (vec![1.0, 0.0], 0.2), (vec![0.0, 1.0], 0.2)]).unwrap()
}

/// Three radius-0.3 disks on the unit circle at 120° spacing.
pub fn symmetric_scene() -> SchottkySet {
    let disks: Vec<(Vec<f64>, f64)> = (0..3)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            (vec![a.cos(), a.sin()], 0.3)
        })
        .collect();
    SchottkySet::from_disks(&disks).unwrap()
}

/// `m` disjoint disks in `[-1, 1]^2` with radii in `[0.1, 0.3]` and gaps of
/// at least 0.05.
pub fn random_scene(rng: &mut impl Rng, m: usize) -> SchottkySet {
    loop {
        let mut disks: Vec<(Vec<f64>, f64)> = Vec::new();
        for _ in 0..200 {
            let c = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let r = rng.gen_range(0.1..0.3);
            let ok = disks.iter().all(|(d, s)| {
                let dist = ((c[0] - d[0]).powi(2) + (c[1] - d[1]).powi(2)).sqrt();
                dist > r + s + 0.05
            });
            if ok {
                disks.push((c, r));
                if disks.len() == m {
                    return SchottkySet::from_disks(&disks).unwrap();
                }
            }
        }
    }
}

pub fn random_sphere(rng: &mut impl Rng, dim: usize) -> Sphere {
    let c = Vector::from_iterator(dim, (0..dim).map(|_| rng.gen_range(-3.0..3.0)));
    Sphere::round(c, rng.gen_range(0.3..3.0)).unwrap()
}

/// A Möbius word of length 1..=`max_len` that keeps every removed ball of
/// `set` bounded.
pub fn random_moebius_for(rng: &mut impl Rng, set: &SchottkySet, max_len: usize) -> Vec<Sphere> {
    loop {
        let len = rng.gen_range(1..=max_len);
        let word: Vec<Sphere> = (0..len).map(|_| random_sphere(rng, set.dim())).collect();
        let images: Option<Vec<Ball>> =
            set.balls().iter().map(|b| schottky_lab::moebius::apply_word_to_ball(&word, b).ok()).collect();
        let Some(images) = images else { continue };
        let sane = images.iter().all(|b| b.bounded().is_some_and(|(c, r)| r > 1e-3 && r < 1e3 && c.norm() < 1e3));
        if sane {
            return word;
        }
    }
}
