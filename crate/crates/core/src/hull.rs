//! Convex hulls in the plane (monotone chain) and in space (incremental
//! beneath-beyond insertion with epsilon orientation predicates).

use crate::error::{Error, Result};
use crate::linalg::{cross3, dot3, norm3, sub3};
use std::collections::HashSet;

fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn sorted_indices(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
    });
    idx
}

/// Normalized turn test: cross product divided by the two edge lengths, so
/// `eps` is a tolerance on the sine of the turning angle.
fn turns_left(o: [f64; 2], a: [f64; 2], b: [f64; 2], eps: f64) -> bool {
    let la = ((a[0] - o[0]).powi(2) + (a[1] - o[1]).powi(2)).sqrt();
    let lb = ((b[0] - o[0]).powi(2) + (b[1] - o[1]).powi(2)).sqrt();
    if la == 0.0 || lb == 0.0 {
        return false;
    }
    cross2(o, a, b) / (la * lb) > eps
}

fn chain(points: &[[f64; 2]], order: impl Iterator<Item = usize>, eps: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for i in order {
        while out.len() >= 2
            && !turns_left(points[out[out.len() - 2]], points[out[out.len() - 1]], points[i], eps)
        {
            out.pop();
        }
        out.push(i);
    }
    out
}

/// Counterclockwise hull vertex indices with collinear points removed.
/// Returns fewer than three indices when the input is collinear.
pub fn convex_hull_2d(points: &[[f64; 2]], eps: f64) -> Vec<usize> {
    let idx = sorted_indices(points);
    if idx.len() < 3 {
        return idx;
    }
    let mut lower = chain(points, idx.iter().cloned(), eps);
    let mut upper = chain(points, idx.iter().rev().cloned(), eps);
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // drop duplicates produced by coincident points
    let mut out: Vec<usize> = Vec::with_capacity(lower.len());
    for i in lower {
        if !out
            .iter()
            .any(|&j| points[j][0] == points[i][0] && points[j][1] == points[i][1])
        {
            out.push(i);
        }
    }
    out
}

/// Lower hull (left to right) of planar points; collinear interior points removed.
pub fn lower_hull_2d(points: &[[f64; 2]], eps: f64) -> Vec<usize> {
    let idx = sorted_indices(points);
    chain(points, idx.into_iter(), eps)
}

/// Triangular hull face, counterclockwise seen from outside.
#[derive(Debug, Clone)]
pub struct Face3 {
    pub verts: [usize; 3],
    pub normal: [f64; 3],
    pub offset: f64,
}

fn make_face(points: &[[f64; 3]], a: usize, b: usize, c: usize) -> Face3 {
    let n = cross3(&sub3(&points[b], &points[a]), &sub3(&points[c], &points[a]));
    let len = norm3(&n);
    let normal = if len > 0.0 {
        [n[0] / len, n[1] / len, n[2] / len]
    } else {
        [0.0; 3]
    };
    Face3 {
        verts: [a, b, c],
        normal,
        offset: dot3(&normal, &points[a]),
    }
}

/// Convex hull of points in R^3 as outward-oriented triangles.
///
/// `eps` is relative to the point cloud's extent. Points within `eps` of the
/// current hull are treated as inside. Fails with `DegenerateHull` when the
/// points are (nearly) coplanar.
pub fn convex_hull_3d(points: &[[f64; 3]], eps: f64) -> Result<Vec<Face3>> {
    let n = points.len();
    if n < 4 {
        return Err(Error::DegenerateHull);
    }
    let extent = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if extent == 0.0 {
        return Err(Error::DegenerateHull);
    }
    let tol = eps * extent;

    // initial tetrahedron: extreme in x, farthest from it, farthest from the line, farthest from the plane
    let i0 = (0..n)
        .min_by(|&a, &b| points[a][0].total_cmp(&points[b][0]))
        .unwrap();
    let i1 = (0..n)
        .max_by(|&a, &b| {
            norm3(&sub3(&points[a], &points[i0])).total_cmp(&norm3(&sub3(&points[b], &points[i0])))
        })
        .unwrap();
    let d01 = sub3(&points[i1], &points[i0]);
    if norm3(&d01) <= tol {
        return Err(Error::DegenerateHull);
    }
    let line_dist = |k: usize| norm3(&cross3(&d01, &sub3(&points[k], &points[i0]))) / norm3(&d01);
    let i2 = (0..n)
        .max_by(|&a, &b| line_dist(a).total_cmp(&line_dist(b)))
        .unwrap();
    if line_dist(i2) <= tol {
        return Err(Error::DegenerateHull);
    }
    let pn = cross3(&d01, &sub3(&points[i2], &points[i0]));
    let pn_len = norm3(&pn);
    let plane_dist = |k: usize| dot3(&pn, &sub3(&points[k], &points[i0])) / pn_len;
    let i3 = (0..n)
        .max_by(|&a, &b| plane_dist(a).abs().total_cmp(&plane_dist(b).abs()))
        .unwrap();
    if plane_dist(i3).abs() <= tol {
        return Err(Error::DegenerateHull);
    }

    let mut faces: Vec<Face3> = Vec::new();
    let base = [i0, i1, i2, i3];
    let centroid = {
        let mut c = [0.0; 3];
        for &i in &base {
            for k in 0..3 {
                c[k] += points[i][k] / 4.0;
            }
        }
        c
    };
    for (a, b, c) in [(i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)] {
        let f = make_face(points, a, b, c);
        if dot3(&f.normal, &centroid) - f.offset > 0.0 {
            faces.push(make_face(points, a, c, b));
        } else {
            faces.push(f);
        }
    }
    let mut alive = vec![true; 4];

    for p in 0..n {
        if base.contains(&p) {
            continue;
        }
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&f| alive[f] && dot3(&faces[f].normal, &points[p]) - faces[f].offset > tol)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut vis_edges: HashSet<(usize, usize)> = HashSet::new();
        for &f in &visible {
            let [a, b, c] = faces[f].verts;
            vis_edges.insert((a, b));
            vis_edges.insert((b, c));
            vis_edges.insert((c, a));
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &f in &visible {
            let [a, b, c] = faces[f].verts;
            for e in [(a, b), (b, c), (c, a)] {
                if !vis_edges.contains(&(e.1, e.0)) {
                    horizon.push(e);
                }
            }
            alive[f] = false;
        }
        for (a, b) in horizon {
            faces.push(make_face(points, a, b, p));
            alive.push(true);
        }
    }

    Ok(faces
        .into_iter()
        .zip(alive)
        .filter_map(|(f, a)| a.then_some(f))
        .collect())
}
