//! Piecewise-linear convex functions: the lower envelope `w` of a body, its
//! conjugate `u = w*`, exact subgradients and discrete Legendre transforms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::hull::{convex_hull_2d, convex_hull_3d, lower_hull_2d};
use crate::linalg::{dist, dot, norm, solve};

/// Relative activation tolerance for subgradient sets.
pub const ACTIVATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub slope: Vec<f64>,
    pub intercept: f64,
}

impl AffinePiece {
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.slope, x) + self.intercept
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub support: f64,
}

/// Compact convex polytope in R^1 or R^2, kept in both representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexDomain {
    pub dimension: usize,
    /// Counterclockwise for dimension 2; `[lo], [hi]` for dimension 1.
    pub vertices: Vec<Vec<f64>>,
    #[serde(rename = "facets")]
    pub halfspaces: Vec<HalfSpace>,
}

impl ConvexDomain {
    /// Convex hull of a point set in R^1 or R^2.
    pub fn hull_of(points: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("empty point set".into()));
        };
        match first.len() {
            1 => {
                let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                Ok(Self {
                    dimension: 1,
                    vertices: vec![vec![lo], vec![hi]],
                    halfspaces: vec![
                        HalfSpace {
                            normal: vec![-1.0],
                            support: -lo,
                        },
                        HalfSpace {
                            normal: vec![1.0],
                            support: hi,
                        },
                    ],
                })
            }
            2 => {
                let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
                let idx = convex_hull_2d(&pts, 1e-12);
                if idx.len() < 3 {
                    return Err(Error::DegenerateHull);
                }
                let vertices: Vec<Vec<f64>> = idx.iter().map(|&i| points[i].clone()).collect();
                let halfspaces = (0..vertices.len())
                    .map(|k| {
                        let a = &vertices[k];
                        let b = &vertices[(k + 1) % vertices.len()];
                        let e = [b[0] - a[0], b[1] - a[1]];
                        let l = (e[0] * e[0] + e[1] * e[1]).sqrt();
                        let normal = vec![e[1] / l, -e[0] / l];
                        let support = dot(&normal, a);
                        HalfSpace { normal, support }
                    })
                    .collect();
                Ok(Self {
                    dimension: 2,
                    vertices,
                    halfspaces,
                })
            }
            d => Err(Error::InvalidInput(format!("domains live in R^1 or R^2, got R^{d}"))),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|h| dot(&h.normal, x) <= h.support + tol)
    }

    /// Radius of the largest origin-centred ball inside the domain (negative if
    /// the origin is outside).
    pub fn inradius_about_origin(&self) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.support)
            .fold(f64::INFINITY, f64::min)
    }

    fn extent(&self) -> f64 {
        self.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max)
    }

    fn membership_tol(&self) -> f64 {
        1e-9 * (1.0 + self.extent())
    }
}

/// `f(x) = max_j (slope_j·x + intercept_j)` on an optional compact domain,
/// `+∞` outside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwlConvexFunction {
    pub pieces: Vec<AffinePiece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<ConvexDomain>,
}

impl PwlConvexFunction {
    pub fn new(pieces: Vec<AffinePiece>) -> Self {
        Self {
            pieces,
            domain: None,
        }
    }

    pub fn with_domain(pieces: Vec<AffinePiece>, domain: ConvexDomain) -> Self {
        Self {
            pieces,
            domain: Some(domain),
        }
    }

    pub fn dimension(&self) -> usize {
        self.pieces[0].slope.len()
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.domain
            .as_ref()
            .is_none_or(|d| d.contains(x, d.membership_tol()))
    }

    /// Max over pieces, ignoring the domain.
    pub fn eval_unrestricted(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.in_domain(x) {
            self.eval_unrestricted(x)
        } else {
            f64::INFINITY
        }
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| norm(&p.slope))
            .fold(0.0, f64::max)
    }
}

/// `u(y) = h_K((y, -1)) = max_p (y·p̂ - p_last)` over the lower vertices of `K`.
///
/// Vertices that lie on no facet with a downward normal never attain the max
/// and are dropped.
pub fn build_u(k: &Polytope) -> PwlConvexFunction {
    let n = k.dimension - 1;
    let mut lower = vec![false; k.vertices.len()];
    for f in k.facets.iter().filter(|f| f.normal.vertical() < -1e-12) {
        for &i in &f.vertex_indices {
            lower[i] = true;
        }
    }
    let pieces = k
        .vertices
        .iter()
        .zip(&lower)
        .filter(|(_, &keep)| keep)
        .map(|(p, _)| AffinePiece {
            slope: p[..n].to_vec(),
            intercept: -p[n],
        })
        .collect();
    PwlConvexFunction::new(pieces)
}

/// Generators of `∂f(x)`: slopes of the pieces active at `x`.
pub fn subgradient(f: &PwlConvexFunction, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    if !f.in_domain(x) {
        return Err(Error::OutsideDomain(x.to_vec()));
    }
    let values: Vec<f64> = f.pieces.iter().map(|p| p.eval(x)).collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = ACTIVATION_TOL * max.abs().max(1.0);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (p, v) in f.pieces.iter().zip(&values) {
        if max - v <= tol && !out.iter().any(|s| dist(s, &p.slope) <= 1e-12) {
            out.push(p.slope.clone());
        }
    }
    Ok(out)
}

fn dedup_pieces(pieces: Vec<AffinePiece>) -> Vec<AffinePiece> {
    let mut out: Vec<AffinePiece> = Vec::new();
    for p in pieces {
        if !out.iter().any(|q| {
            dist(&q.slope, &p.slope) <= 1e-12 * (1.0 + norm(&p.slope))
                && (q.intercept - p.intercept).abs() <= 1e-12 * (1.0 + p.intercept.abs())
        }) {
            out.push(p);
        }
    }
    out
}

/// Exact conjugate `f*(x) = sup_y {x·y - f(y)}` of a PWL convex function.
///
/// Without a domain, `f*` is the lower convex envelope of the points
/// `(slope_j, -intercept_j)` over the hull of the slopes. With a compact domain,
/// `f*` is the max of the affine functions `x ↦ v·x - f(v)` over the vertices `v`
/// of the cell complex of `f` (a superset of candidate points is harmless).
pub fn legendre_transform(f: &PwlConvexFunction) -> Result<PwlConvexFunction> {
    match &f.domain {
        None => conjugate_of_global(f),
        Some(domain) => conjugate_of_restricted(f, domain),
    }
}

fn conjugate_of_global(f: &PwlConvexFunction) -> Result<PwlConvexFunction> {
    let n = f.dimension();
    let slopes: Vec<Vec<f64>> = f.pieces.iter().map(|p| p.slope.clone()).collect();
    let domain = ConvexDomain::hull_of(&slopes)?;
    let mut pieces = Vec::new();
    if n == 1 {
        let pts: Vec<[f64; 2]> = f.pieces.iter().map(|p| [p.slope[0], -p.intercept]).collect();
        let chain = lower_hull_2d(&pts, 1e-14);
        let mut distinct = chain.clone();
        distinct.dedup_by(|a, b| pts[*a][0] == pts[*b][0]);
        if distinct.len() == 1 {
            let y = chain.iter().map(|&i| pts[i][1]).fold(f64::INFINITY, f64::min);
            pieces.push(AffinePiece {
                slope: vec![0.0],
                intercept: y,
            });
        }
        for w in chain.windows(2) {
            let (a, b) = (pts[w[0]], pts[w[1]]);
            if b[0] - a[0] <= 1e-14 * (1.0 + a[0].abs()) {
                continue;
            }
            let m = (b[1] - a[1]) / (b[0] - a[0]);
            pieces.push(AffinePiece {
                slope: vec![m],
                intercept: a[1] - m * a[0],
            });
        }
    } else {
        let mut pts: Vec<[f64; 3]> = f
            .pieces
            .iter()
            .map(|p| [p.slope[0], p.slope[1], -p.intercept])
            .collect();
        // an apex high above the slope cloud makes the lifted set full-dimensional;
        // faces through it point upward and are discarded below
        let m = pts.len() as f64;
        let cx = pts.iter().map(|p| p[0]).sum::<f64>() / m;
        let cy = pts.iter().map(|p| p[1]).sum::<f64>() / m;
        let zmax = pts.iter().map(|p| p[2]).fold(f64::NEG_INFINITY, f64::max);
        let zmin = pts.iter().map(|p| p[2]).fold(f64::INFINITY, f64::min);
        let spread = pts
            .iter()
            .map(|p| ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt())
            .fold(0.0, f64::max);
        pts.push([cx, cy, zmax + 10.0 * (1.0 + spread + (zmax - zmin))]);
        let faces = convex_hull_3d(&pts, 1e-13)?;
        for face in faces.iter().filter(|fc| fc.normal[2] < -1e-12) {
            let nz = face.normal[2];
            pieces.push(AffinePiece {
                slope: vec![-face.normal[0] / nz, -face.normal[1] / nz],
                intercept: face.offset / nz,
            });
        }
    }
    Ok(PwlConvexFunction::with_domain(dedup_pieces(pieces), domain))
}

fn conjugate_of_restricted(f: &PwlConvexFunction, domain: &ConvexDomain) -> Result<PwlConvexFunction> {
    let tol = domain.membership_tol();
    let mut candidates: Vec<Vec<f64>> = domain.vertices.clone();
    let m = f.pieces.len();
    let p = &f.pieces;
    if domain.dimension == 1 {
        for i in 0..m {
            for j in i + 1..m {
                let ds = p[i].slope[0] - p[j].slope[0];
                if ds.abs() > 1e-14 {
                    candidates.push(vec![(p[j].intercept - p[i].intercept) / ds]);
                }
            }
        }
    } else {
        let nv = domain.vertices.len();
        for e in 0..nv {
            let a = &domain.vertices[e];
            let b = &domain.vertices[(e + 1) % nv];
            let dir = [b[0] - a[0], b[1] - a[1]];
            for i in 0..m {
                for j in i + 1..m {
                    let ds = [p[i].slope[0] - p[j].slope[0], p[i].slope[1] - p[j].slope[1]];
                    let denom = ds[0] * dir[0] + ds[1] * dir[1];
                    if denom.abs() <= 1e-14 {
                        continue;
                    }
                    let t = -(dot(&ds, a) + p[i].intercept - p[j].intercept) / denom;
                    if (0.0..=1.0).contains(&t) {
                        candidates.push(vec![a[0] + t * dir[0], a[1] + t * dir[1]]);
                    }
                }
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let rows = vec![
                        vec![p[i].slope[0] - p[j].slope[0], p[i].slope[1] - p[j].slope[1]],
                        vec![p[i].slope[0] - p[k].slope[0], p[i].slope[1] - p[k].slope[1]],
                    ];
                    let det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
                    if det.abs() <= 1e-14 {
                        continue;
                    }
                    let rhs = [p[j].intercept - p[i].intercept, p[k].intercept - p[i].intercept];
                    if let Some(x) = solve(&rows, &rhs) {
                        candidates.push(x);
                    }
                }
            }
        }
    }
    let pieces: Vec<AffinePiece> = candidates
        .into_iter()
        .filter(|x| domain.contains(x, tol))
        .map(|x| {
            let fx = f.eval_unrestricted(&x);
            AffinePiece {
                slope: x,
                intercept: -fx,
            }
        })
        .collect();
    Ok(PwlConvexFunction::new(dedup_pieces(pieces)))
}

/// Vertices of `∂f(x)` ordered as a convex polygon (n = 2) or an interval (n = 1).
pub fn subgradient_polytope(f: &PwlConvexFunction, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let gens = subgradient(f, x)?;
    match x.len() {
        1 => {
            let lo = gens.iter().map(|g| g[0]).fold(f64::INFINITY, f64::min);
            let hi = gens.iter().map(|g| g[0]).fold(f64::NEG_INFINITY, f64::max);
            Ok(vec![vec![lo], vec![hi]])
        }
        _ => {
            let pts: Vec<[f64; 2]> = gens.iter().map(|g| [g[0], g[1]]).collect();
            let idx = convex_hull_2d(&pts, 1e-12);
            Ok(idx.into_iter().map(|i| gens[i].clone()).collect())
        }
    }
}
