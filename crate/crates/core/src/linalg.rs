//! Small dense helpers for points in R^2 and R^3 stored as slices.

use nalgebra::DMatrix;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[inline]
pub fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn to3(p: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    out[..p.len()].copy_from_slice(p);
    out
}

/// Numerical rank of the row set, using singular values relative to the largest.
pub fn rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * smax).count()
}

/// Solve a square linear system; `None` when singular.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let rhs = nalgebra::DVector::from_column_slice(b);
    m.lu().solve(&rhs).map(|x| x.iter().cloned().collect())
}

/// k-dimensional volume of the simplex spanned by `verts` (k = verts.len() - 1, k <= 3),
/// via the Gram determinant of the edge vectors.
pub fn simplex_volume(verts: &[&[f64]]) -> f64 {
    let k = verts.len() - 1;
    let mut e = [[0.0; 3]; 3];
    for (i, v) in verts[1..].iter().enumerate() {
        for (j, (a, b)) in v.iter().zip(verts[0].iter()).enumerate() {
            e[i][j] = a - b;
        }
    }
    let g = |i: usize, j: usize| dot3(&e[i], &e[j]);
    match k {
        0 => 1.0,
        1 => g(0, 0).sqrt(),
        2 => (g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1)).max(0.0).sqrt() / 2.0,
        3 => {
            let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2))
                - g(0, 1) * (g(0, 1) * g(2, 2) - g(1, 2) * g(0, 2))
                + g(0, 2) * (g(0, 1) * g(1, 2) - g(1, 1) * g(0, 2));
            det.max(0.0).sqrt() / 6.0
        }
        _ => panic!("simplex_volume supports k <= 3"),
    }
}
