//! Symmetric polytopes from support data.
//!
//! A body `K = ∩_i {x : x·ξ_i <= h_i}` in R^2 or R^3 is built by polar duality:
//! the hull of the dual points `ξ_i / h_i` is computed, and every hull facet
//! `{y : a·y = 1}` dualizes to the vertex `a` of `K`. Contact facets are then
//! recovered by collecting the vertices that lie on each supporting plane.

use serde::{Deserialize, Serialize};

use crate::envelope::{AffinePiece, ConvexDomain, PwlConvexFunction};
use crate::error::{Error, Result};
use crate::hull::{convex_hull_2d, convex_hull_3d};
use crate::linalg::{cross3, dist, dot, norm, to3};

/// Unit vector in R^2 or R^3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalizes `coords`; fails on zero, non-finite or unsupported dimensions.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if !(2..=3).contains(&coords.len()) {
            return Err(Error::InvalidInput(format!(
                "directions live in R^2 or R^3, got length {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite direction".into()));
        }
        let n = norm(&coords);
        if n == 0.0 {
            return Err(Error::InvalidInput("zero direction".into()));
        }
        Ok(Self(coords.into_iter().map(|c| c / n).collect()))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    /// Last coordinate, the component along the fixed vertical axis.
    pub fn vertical(&self) -> f64 {
        *self.0.last().unwrap()
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

/// Tolerances used while building polytopes.
#[derive(Debug, Clone, Copy)]
pub struct GeomTolerance {
    /// Orientation predicates in the dual hull (normalized determinants).
    pub orientation: f64,
    /// Relative tolerance for a vertex to count as lying on a supporting plane.
    pub contact: f64,
    /// Relative distance under which dual vertices are merged.
    pub merge: f64,
    /// Minimal chord between two input normals.
    pub parallel: f64,
}

impl Default for GeomTolerance {
    fn default() -> Self {
        Self {
            orientation: 1e-10,
            contact: 1e-9,
            merge: 1e-9,
            parallel: 1e-9,
        }
    }
}

/// Contact face `τ_K(ξ)` of a construction normal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Facet {
    pub normal: Direction,
    pub support: f64,
    /// Indices into the polytope's vertex list; counterclockwise about the
    /// outward normal in R^3, along `J ξ` (left to right) in R^2.
    pub vertex_indices: Vec<usize>,
    #[serde(skip)]
    pub vertices: Vec<Vec<f64>>,
    /// n-dimensional Hausdorff measure of the contact set.
    pub area: f64,
}

impl Facet {
    pub fn is_active(&self) -> bool {
        self.area > 0.0
    }

    /// Split the facet into simplices (segments in R^2, a triangle fan in R^3).
    pub fn simplices(&self) -> Vec<Vec<&[f64]>> {
        if !self.is_active() {
            return Vec::new();
        }
        match self.normal.dim() {
            2 => vec![vec![
                self.vertices[0].as_slice(),
                self.vertices[self.vertices.len() - 1].as_slice(),
            ]],
            _ => (1..self.vertices.len() - 1)
                .map(|k| {
                    vec![
                        self.vertices[0].as_slice(),
                        self.vertices[k].as_slice(),
                        self.vertices[k + 1].as_slice(),
                    ]
                })
                .collect(),
        }
    }
}

/// Bounded polytope with the origin in its interior.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polytope {
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Facet>,
}

impl Polytope {
    pub fn support_function(&self, xi: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, xi))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.facets
            .iter()
            .all(|f| dot(f.normal.coords(), x) <= f.support + tol)
    }

    pub fn facet_index(&self, xi: &Direction) -> Option<usize> {
        self.facets
            .iter()
            .position(|f| dist(f.normal.coords(), xi.coords()) <= 1e-12)
    }

    /// Sum of area-weighted outer normals.
    pub fn area_vector_sum(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dimension];
        for f in &self.facets {
            for (sk, nk) in s.iter_mut().zip(f.normal.coords()) {
                *sk += f.area * nk;
            }
        }
        s
    }
}

/// Intersection of the halfspaces `{x·ξ_i <= h_i}`.
pub fn build_polytope(normals: &[Direction], supports: &[f64]) -> Result<Polytope> {
    build_polytope_with(normals, supports, &GeomTolerance::default())
}

pub fn build_polytope_with(
    normals: &[Direction],
    supports: &[f64],
    tol: &GeomTolerance,
) -> Result<Polytope> {
    if normals.len() != supports.len() {
        return Err(Error::InvalidInput(format!(
            "{} normals but {} supports",
            normals.len(),
            supports.len()
        )));
    }
    let Some(first) = normals.first() else {
        return Err(Error::InvalidInput("no normals".into()));
    };
    let d = first.dim();
    if normals.iter().any(|n| n.dim() != d) {
        return Err(Error::InvalidInput("normals of mixed dimension".into()));
    }
    if normals.len() < d + 1 {
        return Err(Error::InvalidInput(format!(
            "need at least {} normals in R^{d}, got {}",
            d + 1,
            normals.len()
        )));
    }
    if let Some(h) = supports.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
        return Err(Error::InvalidInput(format!("support values must be positive, got {h}")));
    }
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            if dist(normals[i].coords(), normals[j].coords()) <= tol.parallel {
                return Err(Error::InvalidInput(format!(
                    "normals {i} and {j} are (nearly) parallel"
                )));
            }
        }
    }

    let dual: Vec<Vec<f64>> = normals
        .iter()
        .zip(supports)
        .map(|(n, h)| n.coords().iter().map(|c| c / h).collect())
        .collect();
    let extent = dual.iter().map(|q| norm(q)).fold(0.0, f64::max);

    let mut raw_vertices: Vec<Vec<f64>> = Vec::new();
    if d == 2 {
        let pts: Vec<[f64; 2]> = dual.iter().map(|q| [q[0], q[1]]).collect();
        let hull = convex_hull_2d(&pts, tol.orientation);
        if hull.len() < 3 {
            return Err(Error::DegenerateHull);
        }
        for k in 0..hull.len() {
            let a = pts[hull[k]];
            let b = pts[hull[(k + 1) % hull.len()]];
            // line through a, b: n·y = c with n the outward normal of the CCW edge
            let e = [b[0] - a[0], b[1] - a[1]];
            let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
            let nrm = [e[1] / len, -e[0] / len];
            let c = nrm[0] * a[0] + nrm[1] * a[1];
            if c <= tol.orientation * extent {
                return Err(Error::UnboundedBody);
            }
            raw_vertices.push(vec![nrm[0] / c, nrm[1] / c]);
        }
    } else {
        let pts: Vec<[f64; 3]> = dual.iter().map(|q| to3(q)).collect();
        let faces = convex_hull_3d(&pts, tol.orientation)?;
        for f in &faces {
            if f.offset <= tol.orientation * extent {
                return Err(Error::UnboundedBody);
            }
            raw_vertices.push(f.normal.iter().map(|c| c / f.offset).collect());
        }
    }

    // coplanar dual points triangulated into several faces give repeated vertices
    let vscale = raw_vertices.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for v in raw_vertices {
        if !vertices.iter().any(|w| dist(w, &v) <= tol.merge * vscale) {
            vertices.push(v);
        }
    }

    let facets = normals
        .iter()
        .zip(supports)
        .map(|(n, &h)| contact_facet(&vertices, n, h, tol))
        .collect();

    Ok(Polytope {
        dimension: d,
        vertices,
        facets,
    })
}

fn contact_facet(vertices: &[Vec<f64>], normal: &Direction, support: f64, tol: &GeomTolerance) -> Facet {
    let xi = normal.coords();
    let on_plane: Vec<usize> = (0..vertices.len())
        .filter(|&k| (dot(&vertices[k], xi) - support).abs() <= tol.contact * support.max(1.0))
        .collect();

    let (vertex_indices, area) = if xi.len() == 2 {
        let t = [-xi[1], xi[0]];
        let mut idx = on_plane;
        idx.sort_by(|&a, &b| dot(&vertices[a], &t).total_cmp(&dot(&vertices[b], &t)));
        let area = if idx.len() >= 2 {
            dist(&vertices[idx[0]], &vertices[idx[idx.len() - 1]])
        } else {
            0.0
        };
        (idx, area)
    } else {
        order_planar_polygon(vertices, on_plane, xi)
    };

    let area = if area <= 1e-14 * support * support { 0.0 } else { area };
    Facet {
        normal: normal.clone(),
        support,
        vertices: vertex_indices.iter().map(|&k| vertices[k].clone()).collect(),
        vertex_indices,
        area,
    }
}

/// Counterclockwise order (about `xi`) of coplanar vertices and the polygon area.
fn order_planar_polygon(vertices: &[Vec<f64>], idx: Vec<usize>, xi: &[f64]) -> (Vec<usize>, f64) {
    if idx.len() < 3 {
        return (idx, 0.0);
    }
    let n = to3(xi);
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let c = cross3(&helper, &n);
        let l = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        [c[0] / l, c[1] / l, c[2] / l]
    };
    let e2 = cross3(&n, &e1);
    let m = idx.len() as f64;
    let mut centroid = [0.0; 3];
    for &k in &idx {
        for c in 0..3 {
            centroid[c] += vertices[k][c] / m;
        }
    }
    let local = |k: usize| {
        let p = [
            vertices[k][0] - centroid[0],
            vertices[k][1] - centroid[1],
            vertices[k][2] - centroid[2],
        ];
        [
            p[0] * e1[0] + p[1] * e1[1] + p[2] * e1[2],
            p[0] * e2[0] + p[1] * e2[1] + p[2] * e2[2],
        ]
    };
    let mut ordered = idx;
    ordered.sort_by(|&a, &b| {
        let pa = local(a);
        let pb = local(b);
        pa[1].atan2(pa[0]).total_cmp(&pb[1].atan2(pb[0]))
    });
    let mut area = 0.0;
    for k in 0..ordered.len() {
        let p = local(ordered[k]);
        let q = local(ordered[(k + 1) % ordered.len()]);
        area += p[0] * q[1] - p[1] * q[0];
    }
    (ordered, 0.5 * area.abs())
}

/// The contact facet `τ_K(ξ)` for a construction normal `ξ`.
pub fn facet_for_normal(k: &Polytope, xi: &Direction) -> Result<Facet> {
    k.facet_index(xi)
        .map(|i| k.facets[i].clone())
        .ok_or_else(|| Error::UnknownNormal(xi.coords().to_vec()))
}

/// `w(x) = inf{t : (x, t) ∈ K}` along the last axis, as a max of affine pieces
/// over the projected domain `π(K)`.
pub fn lower_envelope(k: &Polytope) -> Result<PwlConvexFunction> {
    let n = k.dimension - 1;
    let pieces: Vec<AffinePiece> = k
        .facets
        .iter()
        .filter(|f| f.normal.vertical() < 0.0)
        .map(|f| {
            let xi = f.normal.coords();
            let s = -xi[n];
            AffinePiece {
                slope: xi[..n].iter().map(|c| c / s).collect(),
                intercept: -f.support / s,
            }
        })
        .collect();
    if pieces.is_empty() {
        return Err(Error::NoLowerFacets);
    }
    let projected: Vec<Vec<f64>> = k.vertices.iter().map(|v| v[..n].to_vec()).collect();
    let domain = ConvexDomain::hull_of(&projected)?;
    Ok(PwlConvexFunction::with_domain(pieces, domain))
}
