//! Deterministic direction sets on the unit sphere `S^{n-1}`.

use std::f64::consts::PI;

use crate::moebius::Vector;

/// Default number of directions for circles (n = 2).
pub const DEFAULT_CIRCLE_DIRECTIONS: usize = 256;

/// Default number of directions for spheres of dimension n ≥ 3.
pub const DEFAULT_SPHERE_DIRECTIONS: usize = 1024;

/// Default direction count for ambient dimension `n`.
pub fn default_direction_count(n: usize) -> usize {
    if n <= 2 {
        DEFAULT_CIRCLE_DIRECTIONS
    } else {
        DEFAULT_SPHERE_DIRECTIONS
    }
}

/// Returns `m` near-uniform unit vectors in `R^n`.
///
/// n = 1 yields `±1`; n = 2 uses equally spaced angles starting on the first
/// axis; n = 3 uses a Fibonacci spiral grid; higher dimensions use Halton
/// points pushed through the Box–Muller transform, preceded by the `±e_i`
/// axes.
pub fn unit_directions(n: usize, m: usize) -> Vec<Vector> {
    assert!(n >= 1, "dimension must be at least 1");
    match n {
        1 => vec![Vector::from_vec(vec![1.0]), Vector::from_vec(vec![-1.0])],
        2 => (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                Vector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect(),
        3 => fibonacci_sphere(m),
        _ => halton_sphere(n, m),
    }
}

fn fibonacci_sphere(m: usize) -> Vec<Vector> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * k as f64;
            Vector::from_vec(vec![rho * phi.cos(), rho * phi.sin(), z])
        })
        .collect()
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in the given base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

fn halton_sphere(n: usize, m: usize) -> Vec<Vector> {
    assert!(2 * n <= 2 * PRIMES.len(), "dimension too large for Halton bases");
    let mut out = Vec::with_capacity(m);
    for axis in 0..n {
        for sign in [1.0, -1.0] {
            if out.len() == m {
                return out;
            }
            let mut v = Vector::zeros(n);
            v[axis] = sign;
            out.push(v);
        }
    }
    let mut index = 1u64;
    while out.len() < m {
        let mut v = Vector::zeros(n);
        for i in 0..n {
            // pair of Halton coordinates per Gaussian
            let u1 = radical_inverse(index, PRIMES[(2 * i) % PRIMES.len()]).max(1e-12);
            let u2 = radical_inverse(index, PRIMES[(2 * i + 1) % PRIMES.len()]);
            v[i] = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
        }
        index += 1;
        let norm = v.norm();
        if norm > 1e-9 {
            out.push(v / norm);
        }
    }
    out
}
