#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmink::geometry::Direction;
use wmink::lift::{Atom, DirectionalMeasure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dir(v: &[f64]) -> Direction {
    Direction::new(v.to_vec()).unwrap()
}

/// Even normal set containing the coordinate axes plus `pairs` random pairs.
pub fn random_even_normals(rng: &mut ChaCha8Rng, d: usize, pairs: usize) -> Vec<Direction> {
    let mut out = Vec::new();
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        out.push(dir(&e));
        out.push(dir(&e).neg());
    }
    for _ in 0..pairs {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = dir(&v);
        out.push(n.clone());
        out.push(n.neg());
    }
    out
}

fn triangle_area(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
}

/// `k` atoms in generic position: pairwise separated and, for n = 2, no three
/// nearly collinear.
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DirectionalMeasure {
    let mut xs: Vec<Vec<f64>> = Vec::new();
    while xs.len() < k {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let separated = xs.iter().all(|y| wmink::linalg::dist(y, &x) > 0.25);
        let generic = n == 1
            || xs.iter().enumerate().all(|(i, a)| {
                xs[i + 1..]
                    .iter()
                    .all(|b| triangle_area(a, b, &x) > 0.05)
            });
        if separated && generic {
            xs.push(x);
        }
    }
    let atoms = xs
        .into_iter()
        .map(|x| Atom {
            x,
            mass: rng.gen_range(0.5..1.5),
        })
        .collect();
    DirectionalMeasure::new(n, atoms).unwrap()
}

/// Points strictly inside the convex hull of `verts`, shrunk towards the origin.
pub fn interior_samples(rng: &mut ChaCha8Rng, verts: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let n = verts[0].len();
    (0..count)
        .map(|_| {
            let l: Vec<f64> = verts.iter().map(|_| rng.gen_range(0.0..1.0f64).powi(4)).collect();
            let s: f64 = l.iter().sum();
            (0..n)
                .map(|c| 0.95 * verts.iter().zip(&l).map(|(v, li)| v[c] * li / s).sum::<f64>())
                .collect()
        })
        .collect()
}
