//! Transport of an atomic measure on R^n to an even atomic measure on S^n.
//!
//! Each atom `(x, m)` is reweighted by `√(1+|x|²)`, pushed to the lower
//! hemisphere through `L(x) = (x, -1)/√(1+|x|²)`, and mirrored to `-L(x)`.
//! Nothing is placed on the equator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::linalg::{dist, rank};
use crate::minkowski::MinkowskiTarget;

/// Atoms closer than this (in input coordinates) are merged.
pub const MERGE_TOL: f64 = 1e-9;
/// Relative singular-value cutoff for the spanning checks.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub x: Vec<f64>,
    pub mass: f64,
}

/// Finite atomic measure on R^n, n ∈ {1, 2}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionalMeasure {
    pub dimension: usize,
    pub atoms: Vec<Atom>,
}

impl DirectionalMeasure {
    /// Validates the atoms and merges duplicates (summing their masses).
    pub fn new(dimension: usize, atoms: Vec<Atom>) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::InvalidInput(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidInput("measure has no atoms".into()));
        }
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for (i, a) in atoms.into_iter().enumerate() {
            if a.x.len() != dimension {
                return Err(Error::InvalidInput(format!(
                    "atom {i}: expected {dimension} coordinates, got {}",
                    a.x.len()
                )));
            }
            if a.x.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(format!("atom {i}: non-finite position")));
            }
            if !(a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "atom {i}: mass must be positive, got {}",
                    a.mass
                )));
            }
            match merged.iter_mut().find(|b| dist(&b.x, &a.x) <= MERGE_TOL) {
                Some(b) => b.mass += a.mass,
                None => merged.push(a),
            }
        }
        Ok(Self {
            dimension,
            atoms: merged,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn first_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass * crate::linalg::norm(&a.x)).sum()
    }

    /// Rank of `{(x_j, 1)}`; below `n + 1` means the atoms lie on an affine hyperplane.
    pub fn affine_rank(&self) -> usize {
        let rows: Vec<Vec<f64>> = self
            .atoms
            .iter()
            .map(|a| {
                let mut r = a.x.clone();
                r.push(1.0);
                r
            })
            .collect();
        rank(&rows, RANK_TOL)
    }

    pub fn is_concentrated_on_hyperplane(&self) -> bool {
        self.affine_rank() < self.dimension + 1
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            dimension: self.dimension,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    x: a.x.clone(),
                    mass: a.mass * t,
                })
                .collect(),
        }
    }
}

/// `L(x) = (x, -1)/√(1+|x|²)`.
pub fn lift_point(x: &[f64]) -> Direction {
    let s = (1.0 + x.iter().map(|c| c * c).sum::<f64>()).sqrt();
    let mut coords: Vec<f64> = x.iter().map(|c| c / s).collect();
    coords.push(-1.0 / s);
    Direction::new(coords).expect("lifted point is a nonzero vector in R^2 or R^3")
}

/// Inverse of `L` on the open lower hemisphere.
pub fn unlift(xi: &Direction) -> Option<Vec<f64>> {
    let s = xi.vertical();
    if s >= 0.0 {
        return None;
    }
    let c = xi.coords();
    Some(c[..c.len() - 1].iter().map(|v| -v / s).collect())
}

/// `ρ'`: same atoms, masses multiplied by `√(1+|x|²)`.
pub fn build_rho_prime(rho: &DirectionalMeasure) -> DirectionalMeasure {
    DirectionalMeasure {
        dimension: rho.dimension,
        atoms: rho
            .atoms
            .iter()
            .map(|a| Atom {
                x: a.x.clone(),
                mass: a.mass * (1.0 + a.x.iter().map(|c| c * c).sum::<f64>()).sqrt(),
            })
            .collect(),
    }
}

/// Even target `L♯ρ' + (L♯ρ')∘R` with pairs `(L(x_j), -L(x_j))` at indices `2j, 2j+1`.
pub fn symmetrized_lift(rho: &DirectionalMeasure) -> Result<MinkowskiTarget> {
    let prime = build_rho_prime(rho);
    let mut normals = Vec::with_capacity(2 * prime.atoms.len());
    let mut masses = Vec::with_capacity(2 * prime.atoms.len());
    for a in &prime.atoms {
        let xi = lift_point(&a.x);
        normals.push(xi.clone());
        normals.push(xi.neg());
        masses.push(a.mass);
        masses.push(a.mass);
    }
    let ambient = rho.dimension + 1;
    let r = rank(
        &normals.iter().map(|n| n.coords().to_vec()).collect::<Vec<_>>(),
        RANK_TOL,
    );
    if r < ambient {
        return Err(Error::ConcentratedOnHyperplane { rank: r, ambient });
    }
    MinkowskiTarget::new(normals, masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cross3, dot3, norm};

    fn atom(x: &[f64], mass: f64) -> Atom {
        Atom { x: x.to_vec(), mass }
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_point(&[0.0]).coords(), &[0.0, -1.0]);
        assert_eq!(lift_point(&[0.0, 0.0]).coords(), &[0.0, 0.0, -1.0]);
        let l = lift_point(&[1.0]);
        let h = 1.0 / 2f64.sqrt();
        assert!((l.coords()[0] - h).abs() < 1e-15 && (l.coords()[1] + h).abs() < 1e-15);
        assert!((norm(lift_point(&[3.0, -7.0]).coords()) - 1.0).abs() <= 1e-12);
        assert_eq!(unlift(&lift_point(&[0.25, -4.0])).unwrap().len(), 2);
    }

    #[test]
    fn collinear_points_lift_to_a_great_circle() {
        // points on the line x2 = 2 x1 + 1
        let pts = [[0.0, 1.0], [1.0, 3.0], [-2.5, -4.0]];
        let l: Vec<[f64; 3]> = pts
            .iter()
            .map(|p| {
                let c = lift_point(p);
                [c.coords()[0], c.coords()[1], c.coords()[2]]
            })
            .collect();
        let det = dot3(&cross3(&l[0], &l[1]), &l[2]);
        assert!(det.abs() <= 1e-12);
    }

    #[test]
    fn rho_prime_masses() {
        let rho = DirectionalMeasure::new(1, vec![atom(&[0.0], 2.0), atom(&[1.0], 1.0)]).unwrap();
        let p = build_rho_prime(&rho);
        assert_eq!(p.atoms[0].mass, 2.0);
        assert!((p.atoms[1].mass - 2f64.sqrt()).abs() < 1e-15);
        assert!(p.total_mass() >= rho.total_mass());
        assert_eq!(p.atoms.iter().map(|a| &a.x).collect::<Vec<_>>(), rho.atoms.iter().map(|a| &a.x).collect::<Vec<_>>());
    }

    #[test]
    fn duplicates_are_merged() {
        let rho = DirectionalMeasure::new(
            2,
            vec![atom(&[1.0, 2.0], 1.0), atom(&[1.0, 2.0 + 1e-12], 0.5), atom(&[0.0, 0.0], 1.0)],
        )
        .unwrap();
        assert_eq!(rho.atoms.len(), 2);
        assert_eq!(rho.atoms[0].mass, 1.5);
    }

    #[test]
    fn invalid_atoms() {
        assert!(DirectionalMeasure::new(3, vec![atom(&[0.0, 0.0, 0.0], 1.0)]).is_err());
        assert!(DirectionalMeasure::new(1, vec![atom(&[0.0], -1.0)]).is_err());
        assert!(DirectionalMeasure::new(1, vec![atom(&[0.0, 1.0], 1.0)]).is_err());
        assert!(DirectionalMeasure::new(1, vec![]).is_err());
    }

    #[test]
    fn single_atom_is_concentrated() {
        let rho = DirectionalMeasure::new(1, vec![atom(&[0.0], 1.0)]).unwrap();
        assert!(rho.is_concentrated_on_hyperplane());
        assert_eq!(
            symmetrized_lift(&rho).unwrap_err(),
            Error::ConcentratedOnHyperplane { rank: 1, ambient: 2 }
        );
        let rho = DirectionalMeasure::new(
            2,
            vec![atom(&[0.0, 0.0], 1.0), atom(&[1.0, 1.0], 1.0), atom(&[2.0, 2.0], 1.0)],
        )
        .unwrap();
        assert!(matches!(symmetrized_lift(&rho), Err(Error::ConcentratedOnHyperplane { .. })));
    }

    #[test]
    fn three_atoms_on_the_line() {
        let rho = DirectionalMeasure::new(
            1,
            vec![atom(&[-1.0], 1.0), atom(&[0.0], 1.0), atom(&[1.0], 1.0)],
        )
        .unwrap();
        let t = symmetrized_lift(&rho).unwrap();
        assert_eq!(t.normals.len(), 6);
        let h = 1.0 / 2f64.sqrt();
        let expect = [
            ([-h, -h], 2f64.sqrt()),
            ([h, h], 2f64.sqrt()),
            ([0.0, -1.0], 1.0),
            ([0.0, 1.0], 1.0),
            ([h, -h], 2f64.sqrt()),
            ([-h, h], 2f64.sqrt()),
        ];
        for (i, (n, m)) in expect.iter().enumerate() {
            assert!((t.normals[i].coords()[0] - n[0]).abs() < 1e-15);
            assert!((t.normals[i].coords()[1] - n[1]).abs() < 1e-15);
            assert!((t.masses[i] - m).abs() < 1e-15);
        }
        let s = t.moment();
        assert!(s.iter().all(|c| *c == 0.0));
    }
}
