//! Discrete weighted Minkowski problem on an even set of normals.
//!
//! For support values `h` let `K(h) = ∩_i {x·ξ_i <= h_i}`. The energy
//!
//! ```text
//! E(h) = (d/β) μ(K(h))^{β/d} - Σ_i a_i h_i,      d = n + 1
//! ```
//!
//! has partial derivatives `μ(K)^{β/d-1} F_i(h) - a_i`, where `F_i` is the
//! weighted area of facet `i` (the first variation of `μ(K(h))` in `h_i`).
//! Stationary points are exactly the bodies with `c_{μ,K} F_i = a_i`. The solver
//! runs gradient ascent on one support value per antipodal pair, with a
//! Barzilai-Borwein trial step and Armijo backtracking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_polytope, Direction, Polytope};
use crate::linalg::{dist, rank};
use crate::measure::{c_from_mass, mu_volume_with, weighted_facet_area_with, QuadratureSpec, Weight};
use crate::quadrature::Rules;

/// Even atomic measure on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinkowskiTarget {
    pub normals: Vec<Direction>,
    pub masses: Vec<f64>,
    /// Antipodal index pairs `[i, j]` with `ξ_j = -ξ_i`, ordered by `i`.
    pub pairs: Vec<[usize; 2]>,
}

impl MinkowskiTarget {
    pub fn new(normals: Vec<Direction>, masses: Vec<f64>) -> Result<Self> {
        if normals.len() != masses.len() {
            return Err(Error::InvalidInput(format!(
                "{} normals but {} masses",
                normals.len(),
                masses.len()
            )));
        }
        if normals.is_empty() {
            return Err(Error::InvalidInput("empty target".into()));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidInput(format!("masses must be positive, got {m}")));
        }
        let d = normals[0].dim();
        if normals.iter().any(|n| n.dim() != d) {
            return Err(Error::InvalidInput("normals of mixed dimension".into()));
        }
        let mut partner = vec![usize::MAX; normals.len()];
        for i in 0..normals.len() {
            let anti: Vec<usize> = (0..normals.len())
                .filter(|&j| dist(normals[i].neg().coords(), normals[j].coords()) <= 1e-9)
                .collect();
            if anti.len() != 1 {
                return Err(Error::InvalidInput(format!(
                    "normal {i} has {} antipodes; targets must be even",
                    anti.len()
                )));
            }
            let j = anti[0];
            if (masses[i] - masses[j]).abs() > 1e-12 * masses[i].max(masses[j]) {
                return Err(Error::InvalidInput(format!(
                    "antipodal normals {i} and {j} carry different masses"
                )));
            }
            partner[i] = j;
        }
        let pairs: Vec<[usize; 2]> = (0..normals.len())
            .filter(|&i| i < partner[i])
            .map(|i| [i, partner[i]])
            .collect();
        let rows: Vec<Vec<f64>> = normals.iter().map(|n| n.coords().to_vec()).collect();
        let r = rank(&rows, 1e-10);
        if r < d {
            return Err(Error::InvalidInput(format!(
                "normals span only a {r}-dimensional subspace of R^{d}"
            )));
        }
        Ok(Self {
            normals,
            masses,
            pairs,
        })
    }

    /// Target from one representative per pair; the antipodes are appended
    /// right after each representative.
    pub fn from_representatives(reps: &[Direction], masses: &[f64]) -> Result<Self> {
        let mut normals = Vec::with_capacity(2 * reps.len());
        let mut all = Vec::with_capacity(2 * reps.len());
        for (n, m) in reps.iter().zip(masses) {
            normals.push(n.clone());
            normals.push(n.neg());
            all.push(*m);
            all.push(*m);
        }
        Self::new(normals, all)
    }

    pub fn ambient_dim(&self) -> usize {
        self.normals[0].dim()
    }

    pub fn max_mass(&self) -> f64 {
        self.masses.iter().cloned().fold(0.0, f64::max)
    }

    /// `Σ_i a_i ξ_i`, accumulated in index order.
    pub fn moment(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.ambient_dim()];
        for (n, m) in self.normals.iter().zip(&self.masses) {
            for (sk, c) in s.iter_mut().zip(n.coords()) {
                *sk += m * c;
            }
        }
        s
    }

    /// Expand per-pair support values to one value per normal.
    pub fn expand(&self, pair_values: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; self.normals.len()];
        for (p, v) in self.pairs.iter().zip(pair_values) {
            h[p[0]] = *v;
            h[p[1]] = *v;
        }
        h
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            normals: self.normals.clone(),
            masses: self.masses.iter().map(|m| m * t).collect(),
            pairs: self.pairs.clone(),
        }
    }
}

/// Everything computed at one support vector.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub polytope: Polytope,
    pub mass: f64,
    pub c: f64,
    pub energy: f64,
    /// Weighted facet areas `F_i`, one per normal.
    pub facet_areas: Vec<f64>,
    /// `c F_i - a_i`, one per normal.
    pub gradient: Vec<f64>,
}

/// Evaluates the energy and its gradient, reusing quadrature rules.
pub struct Evaluator<'a> {
    pub target: &'a MinkowskiTarget,
    pub weight: &'a Weight,
    rules: Rules,
}

impl<'a> Evaluator<'a> {
    pub fn new(target: &'a MinkowskiTarget, weight: &'a Weight, q: &QuadratureSpec) -> Self {
        Self {
            target,
            weight,
            rules: q.rules(),
        }
    }

    pub fn evaluate(&self, h: &[f64]) -> Result<Evaluation> {
        let k = build_polytope(&self.target.normals, h)?;
        let d = k.dimension as f64;
        let mass = mu_volume_with(&k, self.weight, &self.rules);
        let c = c_from_mass(mass, self.weight, k.dimension)?;
        let facet_areas: Vec<f64> = k
            .facets
            .iter()
            .map(|f| weighted_facet_area_with(f, self.weight, &self.rules))
            .collect();
        let beta = self.weight.beta;
        let linear: f64 = self.target.masses.iter().zip(h).map(|(a, x)| a * x).sum();
        let energy = d / beta * mass.powf(beta / d) - linear;
        let gradient = facet_areas
            .iter()
            .zip(&self.target.masses)
            .map(|(f, a)| c * f - a)
            .collect();
        Ok(Evaluation {
            polytope: k,
            mass,
            c,
            energy,
            facet_areas,
            gradient,
        })
    }

    /// Evaluation at per-pair support values; facet areas are averaged over each
    /// antipodal pair so the residuals are exactly even.
    pub fn evaluate_pairs(&self, x: &[f64]) -> Result<Evaluation> {
        let mut e = self.evaluate(&self.target.expand(x))?;
        for p in &self.target.pairs {
            let f = 0.5 * (e.facet_areas[p[0]] + e.facet_areas[p[1]]);
            e.facet_areas[p[0]] = f;
            e.facet_areas[p[1]] = f;
            e.gradient[p[0]] = e.c * f - self.target.masses[p[0]];
            e.gradient[p[1]] = e.c * f - self.target.masses[p[1]];
        }
        Ok(e)
    }
}

/// `E(h)` and `∇E(h)` for support values `h` (one per normal).
pub fn energy_and_gradient(
    h: &[f64],
    target: &MinkowskiTarget,
    weight: &Weight,
    q: &QuadratureSpec,
) -> Result<(f64, Vec<f64>)> {
    if let Some(x) = h.iter().find(|x| x.is_nan() || **x <= 0.0) {
        return Err(Error::InvalidInput(format!("support values must be positive, got {x}")));
    }
    let e = Evaluator::new(target, weight, q).evaluate(h)?;
    Ok((e.energy, e.gradient))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Stop once `max_i |c F_i - a_i| <= tol * max_i a_i`.
    pub tol: f64,
    pub max_iters: usize,
    pub armijo_c1: f64,
    pub backtrack: f64,
    /// Support values below this floor count as a collapsed body.
    pub min_support: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 10_000,
            armijo_c1: 1e-4,
            backtrack: 0.5,
            min_support: 1e-9,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidInput(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be positive".into()));
        }
        if !(self.armijo_c1 > 0.0 && self.armijo_c1 < 0.5) || !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidInput("invalid line-search parameters".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// One support value per antipodal pair, in `MinkowskiTarget::pairs` order.
    pub h: Vec<f64>,
    pub c: f64,
    pub mass: f64,
    /// `c F_i - a_i`, one per normal.
    pub residuals: Vec<f64>,
    pub relative_residual: f64,
    pub iterations: usize,
    pub energy_trace: Vec<f64>,
    pub converged: bool,
}

impl SolveReport {
    pub fn ensure_converged(&self) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                relative_residual: self.relative_residual,
            })
        }
    }
}

fn pair_gradient(target: &MinkowskiTarget, g: &[f64]) -> Vec<f64> {
    target.pairs.iter().map(|p| g[p[0]] + g[p[1]]).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Gradient ascent from `h ≡ 1` over the even cone.
///
/// Non-convergence is reported through `converged = false`, not as an error.
pub fn solve_minkowski(
    target: &MinkowskiTarget,
    weight: &Weight,
    q: &QuadratureSpec,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    let eval = Evaluator::new(target, weight, q);
    let scale = target.max_mass();
    let mut x = vec![1.0; target.pairs.len()];
    let mut cur = eval.evaluate_pairs(&x)?;
    let mut trace = vec![cur.energy];
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut last_step = 1.0;
    let mut iterations = 0;
    let mut converged = false;

    loop {
        if max_abs(&cur.gradient) <= opts.tol * scale {
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        let g = pair_gradient(target, &cur.gradient);
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();

        let mut step = match &prev {
            None => 0.1 * x.iter().cloned().fold(f64::INFINITY, f64::min) / max_abs(&g),
            Some((xp, gp)) => {
                let s: Vec<f64> = x.iter().zip(xp).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g.iter().zip(gp).map(|(a, b)| a - b).collect();
                let ss: f64 = s.iter().map(|v| v * v).sum();
                let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
                if sy < 0.0 {
                    ss / -sy
                } else {
                    2.0 * last_step
                }
            }
        };
        // keep every support value above a tenth of its current size
        for (xk, gk) in x.iter().zip(&g) {
            if *gk < 0.0 {
                step = step.min(0.9 * xk / -gk);
            }
        }

        let e0 = cur.energy;
        let linear: f64 = target.masses.iter().zip(target.expand(&x)).map(|(a, h)| a * h).sum();
        let noise = 1e-14 * (e0.abs() + linear.abs());
        let mut accepted = None;
        for _ in 0..80 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xk, gk)| xk + step * gk).collect();
            if let Ok(next) = eval.evaluate_pairs(&trial) {
                if next.energy >= e0 + opts.armijo_c1 * step * gnorm2 - noise {
                    accepted = Some((trial, next));
                    break;
                }
            }
            step *= opts.backtrack;
        }
        let Some((trial, next)) = accepted else {
            break;
        };
        iterations += 1;
        last_step = step;
        prev = Some((std::mem::replace(&mut x, trial), g));
        cur = next;
        trace.push(cur.energy);
        if let Some((pair, _)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| **v < opts.min_support)
        {
            return Err(Error::CollapsedBody {
                pair,
                floor: opts.min_support,
            });
        }
    }

    let relative_residual = max_abs(&cur.gradient) / scale;
    Ok(SolveReport {
        h: x,
        c: cur.c,
        mass: cur.mass,
        residuals: cur.gradient,
        relative_residual,
        iterations,
        energy_trace: trace,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub residuals: Vec<f64>,
    pub c: f64,
    pub max_abs: f64,
    pub relative_max: f64,
}

/// `c F_i - a_i` at per-pair support values.
pub fn residual_report(
    h: &[f64],
    target: &MinkowskiTarget,
    weight: &Weight,
    q: &QuadratureSpec,
) -> Result<ResidualReport> {
    let e = Evaluator::new(target, weight, q).evaluate_pairs(h)?;
    let m = max_abs(&e.gradient);
    Ok(ResidualReport {
        max_abs: m,
        relative_max: m / target.max_mass(),
        residuals: e.gradient,
        c: e.c,
    })
}
