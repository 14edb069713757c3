//! Numerical checks of the constructed solutions.
//!
//! Atomic instances: for a PWL `u` the Monge-Ampère measure is carried by the
//! atoms, and `ω({x_j}) = ∫_{∂u(x_j)} c φ(y, u*(y)) dy`. Since `∂u(x_j)` is the
//! projection of the facet of `K` with normal `ξ_j = L(x_j)`, this equals
//! `c F_j |ξ_j·v| = c F_j / √(1+|x_j|²)`. Both routes are computed.
//!
//! Radial gaussian example: `u(x) = r√(1+|x|²)` with `c_u = 1/a` whenever
//! `a = e^{-r²/2} r^n / (2π)^{(n+1)/2}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::envelope::{legendre_transform, subgradient_polytope, PwlConvexFunction};
use crate::error::{Error, Result};
use crate::geometry::{facet_for_normal, Polytope};
use crate::lift::lift_point;
use crate::linalg::{dot, norm};
use crate::measure::{weighted_facet_area, QuadratureSpec, Weight};
use crate::pipeline::SolvedInstance;

/// Default tolerance on per-atom relative errors.
pub const ATOM_TOL: f64 = 1e-6;
/// Default tolerance on the disagreement between the two evaluation routes.
pub const ROUTE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomMeasure {
    /// `c F_j / √(1+|x_j|²)`; the reported value.
    pub change_of_variables: f64,
    /// Quadrature of `c φ(y, u*(y))` over `∂u(x_j)`.
    pub direct: f64,
    pub facet_area: f64,
    /// `|ξ_j·v| = 1/√(1+|x_j|²)`.
    pub normal_factor: f64,
}

impl AtomMeasure {
    pub fn route_disagreement(&self) -> f64 {
        relative_gap(self.direct, self.change_of_variables)
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// `ω({x_j})` for `u = w*` computed both ways.
pub fn ma_measure_atom(
    u: &PwlConvexFunction,
    k: &Polytope,
    w: &Weight,
    c: f64,
    x: &[f64],
    q: &QuadratureSpec,
) -> Result<AtomMeasure> {
    let ustar = legendre_transform(u)?;
    ma_measure_atom_with(u, &ustar, k, w, c, x, q)
}

/// As [`ma_measure_atom`] with a precomputed `u*`.
pub fn ma_measure_atom_with(
    u: &PwlConvexFunction,
    ustar: &PwlConvexFunction,
    k: &Polytope,
    w: &Weight,
    c: f64,
    x: &[f64],
    q: &QuadratureSpec,
) -> Result<AtomMeasure> {
    let xi = lift_point(x);
    let facet = facet_for_normal(k, &xi).map_err(|_| Error::EmptySubgradientFacet(x.to_vec()))?;
    if !facet.is_active() {
        return Err(Error::EmptySubgradientFacet(x.to_vec()));
    }
    let facet_area = weighted_facet_area(&facet, w, q);
    let normal_factor = -xi.vertical();
    let change_of_variables = c * facet_area * normal_factor;

    let region = subgradient_polytope(u, x)?;
    let rules = q.rules();
    let rule = rules.for_dim(x.len());
    let integrand = |y: &[f64]| {
        let mut z = y.to_vec();
        z.push(ustar.eval_unrestricted(y));
        w.eval(&z)
    };
    let mut direct = 0.0;
    match x.len() {
        1 => {
            direct += rule.integrate(&[&region[0], &region[1]], integrand);
        }
        _ => {
            for t in 1..region.len().saturating_sub(1) {
                direct += rule.integrate(&[&region[0], &region[t], &region[t + 1]], integrand);
            }
        }
    }
    direct *= c;
    if direct <= 0.0 {
        return Err(Error::EmptySubgradientFacet(x.to_vec()));
    }
    Ok(AtomMeasure {
        change_of_variables,
        direct,
        facet_area,
        normal_factor,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomCheck {
    pub x: Vec<f64>,
    pub target_mass: f64,
    /// `ω({x_j})` by change of variables; 0 when evaluation failed.
    pub omega: f64,
    pub direct: f64,
    pub relative_error: f64,
    pub route_disagreement: f64,
    pub facet_area: f64,
    pub normal_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub c: f64,
    pub atoms: Vec<AtomCheck>,
    pub max_relative_error: f64,
    pub max_route_disagreement: f64,
    pub total_omega: f64,
    pub total_mass: f64,
    pub tolerance: f64,
    pub route_tolerance: f64,
    pub converged: bool,
    pub passed: bool,
}

impl VerificationReport {
    /// Fixed-width table, one row per atom.
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:>4}  {:>24}  {:>14}  {:>14}  {:>10}  {:>10}\n",
            "j", "x", "mass", "omega", "rel_err", "routes"
        );
        for (j, a) in self.atoms.iter().enumerate() {
            let x: Vec<String> = a.x.iter().map(|v| format!("{v:.4}")).collect();
            s += &format!(
                "{:>4}  {:>24}  {:>14.8e}  {:>14.8e}  {:>10.2e}  {:>10.2e}{}\n",
                j,
                format!("({})", x.join(", ")),
                a.target_mass,
                a.omega,
                a.relative_error,
                a.route_disagreement,
                a.error.as_ref().map(|e| format!("  {e}")).unwrap_or_default()
            );
        }
        s += &format!(
            "c_u = {:.12e}  max rel err = {:.3e}  max route gap = {:.3e}  {}\n",
            self.c,
            self.max_relative_error,
            self.max_route_disagreement,
            if self.passed { "PASS" } else { "FAIL" }
        );
        s
    }

    pub fn csv(&self) -> String {
        let n = self.atoms.first().map_or(0, |a| a.x.len());
        let mut s: String = (0..n).map(|k| format!("x{},", k + 1)).collect();
        s += "target_mass,omega,direct,relative_error,route_disagreement,facet_area,normal_factor\n";
        for a in &self.atoms {
            for v in &a.x {
                s += &format!("{v:e},");
            }
            s += &format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                a.target_mass,
                a.omega,
                a.direct,
                a.relative_error,
                a.route_disagreement,
                a.facet_area,
                a.normal_factor
            );
        }
        s
    }
}

/// Atom-by-atom check of `ω({x_j}) = m_j`. Failures are recorded, never raised.
pub fn verify_instance(inst: &SolvedInstance) -> VerificationReport {
    verify_instance_with(inst, ATOM_TOL, ROUTE_TOL)
}

pub fn verify_instance_with(inst: &SolvedInstance, tol: f64, route_tol: f64) -> VerificationReport {
    verify_parts(
        &inst.rho.atoms.iter().map(|a| (a.x.clone(), a.mass)).collect::<Vec<_>>(),
        &inst.u,
        &inst.polytope,
        &inst.weight,
        inst.c(),
        &inst.quadrature,
        inst.report.converged,
        tol,
        route_tol,
    )
}

/// Verification from raw parts, for re-checking stored solutions.
#[allow(clippy::too_many_arguments)]
pub fn verify_parts(
    atoms: &[(Vec<f64>, f64)],
    u: &PwlConvexFunction,
    k: &Polytope,
    w: &Weight,
    c: f64,
    q: &QuadratureSpec,
    converged: bool,
    tol: f64,
    route_tol: f64,
) -> VerificationReport {
    let ustar = legendre_transform(u);
    let checks: Vec<AtomCheck> = atoms
        .iter()
        .map(|(x, m)| {
            let res = ustar
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|us| ma_measure_atom_with(u, us, k, w, c, x, q));
            match res {
                Ok(am) => AtomCheck {
                    x: x.clone(),
                    target_mass: *m,
                    omega: am.change_of_variables,
                    direct: am.direct,
                    relative_error: (am.change_of_variables - m).abs() / m,
                    route_disagreement: am.route_disagreement(),
                    facet_area: am.facet_area,
                    normal_factor: am.normal_factor,
                    error: None,
                },
                Err(e) => AtomCheck {
                    x: x.clone(),
                    target_mass: *m,
                    omega: 0.0,
                    direct: 0.0,
                    relative_error: 1.0,
                    route_disagreement: 1.0,
                    facet_area: 0.0,
                    normal_factor: 1.0 / (1.0 + dot(x, x)).sqrt(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let max_relative_error = checks.iter().map(|a| a.relative_error).fold(0.0, f64::max);
    let max_route_disagreement = checks.iter().map(|a| a.route_disagreement).fold(0.0, f64::max);
    let passed = converged
        && checks.iter().all(|a| a.error.is_none())
        && max_relative_error <= tol
        && max_route_disagreement <= route_tol;
    VerificationReport {
        c,
        total_omega: checks.iter().map(|a| a.omega).sum(),
        total_mass: atoms.iter().map(|a| a.1).sum(),
        atoms: checks,
        max_relative_error,
        max_route_disagreement,
        tolerance: tol,
        route_tolerance: route_tol,
        converged,
        passed,
    }
}

// ---------------------------------------------------------------------------
// Radial gaussian example

/// `e^{-r²/2} r^n / (2π)^{(n+1)/2}`.
pub fn radial_density(r: f64, n: usize) -> f64 {
    (-0.5 * r * r).exp() * r.powi(n as i32) / (2.0 * PI).powf(0.5 * (n as f64 + 1.0))
}

/// Maximum of [`radial_density`], attained at `r = √n`.
pub fn radial_peak(n: usize) -> f64 {
    radial_density((n as f64).sqrt(), n)
}

/// Tolerance on `|a - peak|` for a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RadialRoots {
    Two { r1: f64, r2: f64 },
    DoubleRoot { r: f64 },
    NoRoot,
}

/// Bisection for `g(r) = a` with `g(lo) < a <= g(hi)` or the reverse, down to
/// adjacent floats.
fn bisect(a: f64, n: usize, mut lo: f64, mut hi: f64) -> f64 {
    let rising = radial_density(lo, n) < radial_density(hi, n);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (radial_density(mid, n) < a) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (radial_density(lo, n) - a).abs() <= (radial_density(hi, n) - a).abs() {
        lo
    } else {
        hi
    }
}

/// Radii `r` with `radial_density(r, n) = a`, one on each side of `√n`.
pub fn radial_gauss_roots(a: f64, n: usize) -> Result<RadialRoots> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidInput(format!("level a must be positive, got {a}")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let peak = radial_peak(n);
    let rn = (n as f64).sqrt();
    if (a - peak).abs() <= DOUBLE_ROOT_TOL {
        return Ok(RadialRoots::DoubleRoot { r: rn });
    }
    if a > peak {
        return Ok(RadialRoots::NoRoot);
    }
    let r1 = bisect(a, n, 0.0, rn);
    let mut hi = 2.0 * rn;
    while radial_density(hi, n) >= a {
        hi *= 2.0;
    }
    let r2 = bisect(a, n, rn, hi);
    Ok(RadialRoots::Two { r1, r2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub r: f64,
    pub a: f64,
    pub n: usize,
    pub c_u: f64,
}

impl RadialSolution {
    pub fn new(r: f64, n: usize) -> Self {
        let a = radial_density(r, n);
        Self { r, a, n, c_u: 1.0 / a }
    }

    /// `u(x) = r√(1+|x|²)`.
    pub fn u(&self, x: &[f64]) -> f64 {
        self.r * (1.0 + dot(x, x)).sqrt()
    }

    /// `Du(x) = r x / √(1+|x|²)`.
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let s = (1.0 + dot(x, x)).sqrt();
        x.iter().map(|c| self.r * c / s).collect()
    }

    /// `det D²u(x) = r^n (1+|x|²)^{-(n+2)/2}`.
    pub fn hessian_det(&self, x: &[f64]) -> f64 {
        self.r.powi(self.n as i32) * (1.0 + dot(x, x)).powf(-0.5 * (self.n as f64 + 2.0))
    }

    /// `u*(y) = -√(r² - |y|²)` on `|y| <= r`, `+∞` outside.
    pub fn conjugate(&self, y: &[f64]) -> f64 {
        let t = self.r * self.r - dot(y, y);
        if t < 0.0 {
            f64::INFINITY
        } else {
            -t.sqrt()
        }
    }

    /// Right-hand side consistent with `u`: `(1+|x|²)^{-(n+2)/2}`.
    pub fn rhs(&self, x: &[f64]) -> f64 {
        (1.0 + dot(x, x)).powf(-0.5 * (self.n as f64 + 2.0))
    }

    /// The alternative right-hand side `a/√(1+|x|²)`, kept for comparison.
    pub fn alternative_rhs(&self, x: &[f64]) -> f64 {
        self.a / (1.0 + dot(x, x)).sqrt()
    }

    /// `c_u φ(Du, u*(Du)) det D²u`.
    pub fn lhs(&self, x: &[f64], w: &Weight) -> f64 {
        let mut z = self.grad(x);
        let us = self.conjugate(&z);
        z.push(us);
        self.c_u * w.eval(&z) * self.hessian_det(x)
    }
}

/// Finite-difference step for the derivative cross-checks.
pub const FD_STEP: f64 = 1e-4;
/// Tolerance for the derivative cross-checks.
pub const FD_TOL: f64 = 1e-5;
/// Radial residual tolerance.
pub const RADIAL_TOL: f64 = 1e-6;
/// Tolerance of the sup-scan conjugate check.
pub const CONJUGATE_TOL: f64 = 1e-8;
/// Points within this distance of `|y| = r` are skipped in conjugate checks.
pub const BOUNDARY_GAP: f64 = 1e-3;

/// `count` points with `|x|` evenly spaced in `[0, radius]`. For `n = 2` the
/// angle advances by the golden angle so no axis is favoured.
pub fn radial_grid(n: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let t = if count > 1 {
                radius * k as f64 / (count - 1) as f64
            } else {
                0.0
            };
            match n {
                1 => vec![t],
                _ => {
                    let th = golden * k as f64;
                    let mut v = vec![0.0; n];
                    v[0] = t * th.cos();
                    v[1] = t * th.sin();
                    v
                }
            }
        })
        .collect()
}

pub fn default_radial_grid(n: usize) -> Vec<Vec<f64>> {
    radial_grid(n, 3.0, 200)
}

/// `sup_x {x·y - u(x)}` by golden-section search along `y/|y|`, the only
/// direction that can attain the sup for a radial `u`.
pub fn conjugate_by_sup(sol: &RadialSolution, y: &[f64]) -> f64 {
    let s = norm(y);
    let g = |t: f64| t * s - sol.r * (1.0 + t * t).sqrt();
    if s == 0.0 {
        return -sol.r;
    }
    let mut hi = 1.0;
    while g(2.0 * hi) > g(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    hi *= 2.0;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let (mut ga, mut gb) = (g(a), g(b));
    for _ in 0..200 {
        if ga < gb {
            lo = a;
            a = b;
            ga = gb;
            b = lo + phi * (hi - lo);
            gb = g(b);
        } else {
            hi = b;
            b = a;
            gb = ga;
            a = hi - phi * (hi - lo);
            ga = g(a);
        }
    }
    g(0.5 * (lo + hi)).max(ga).max(gb)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialRow {
    pub x: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_residual: f64,
    pub alternative_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialResidualReport {
    pub solution: RadialSolution,
    pub rows: Vec<RadialRow>,
    pub max_relative_residual: f64,
    /// Largest `|Du - D_h u|` over the grid.
    pub gradient_fd_error: f64,
    /// Largest `|det D²u - det D_h Du| / det D²u` over the grid.
    pub hessian_fd_error: f64,
    /// Largest `|u*(Du) - sup-scan|` over the grid.
    pub conjugate_error: f64,
    /// Largest `|u(x) + u*(Du) - x·Du|` over the grid.
    pub fenchel_error: f64,
    /// Spread of `φ(Du, u*(Du))` over the grid, relative to its mean.
    pub weight_spread: f64,
    /// Largest relative gap between the left-hand side and `a/√(1+|x|²)`.
    pub alternative_rhs_deviation: f64,
    pub passed: bool,
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        _ => m[0][0] * m[1][1] - m[0][1] * m[1][0],
    }
}

/// Pointwise residual of `c_u φ(Du, u*(Du)) det D²u = (1+|x|²)^{-(n+2)/2}` for
/// `u = r√(1+|x|²)`, with every analytic ingredient cross-checked.
pub fn radial_residual(r: f64, n: usize, grid: &[Vec<f64>]) -> Result<RadialResidualReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidInput(format!("dimension must be 1 or 2, got {n}")));
    }
    if grid.iter().any(|x| x.len() != n) {
        return Err(Error::InvalidInput(format!("grid points must lie in R^{n}")));
    }
    let sol = RadialSolution::new(r, n);
    let w = Weight::gaussian(0.5 / (n as f64 + 1.0))?;
    let h = FD_STEP;
    let mut rows = Vec::with_capacity(grid.len());
    let (mut gerr, mut herr, mut cerr, mut ferr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut alt = 0.0f64;
    let mut phis = Vec::with_capacity(grid.len());
    for x in grid {
        let du = sol.grad(x);
        let mut jac = vec![vec![0.0; n]; n];
        for k in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fd = (sol.u(&xp) - sol.u(&xm)) / (2.0 * h);
            gerr = gerr.max((fd - du[k]).abs());
            let gp = sol.grad(&xp);
            let gm = sol.grad(&xm);
            for i in 0..n {
                jac[i][k] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        let dh = sol.hessian_det(x);
        herr = herr.max((det(&jac) - dh).abs() / dh);

        let us = sol.conjugate(&du);
        if r - norm(&du) > BOUNDARY_GAP {
            cerr = cerr.max((us - conjugate_by_sup(&sol, &du)).abs());
        }
        ferr = ferr.max((sol.u(x) + us - dot(x, &du)).abs());
        let mut z = du.clone();
        z.push(us);
        phis.push(w.eval(&z));

        let lhs = sol.lhs(x, &w);
        let rhs = sol.rhs(x);
        let a_rhs = sol.alternative_rhs(x);
        alt = alt.max((lhs - a_rhs).abs() / a_rhs);
        rows.push(RadialRow {
            x: x.clone(),
            lhs,
            rhs,
            relative_residual: (lhs - rhs).abs() / rhs,
            alternative_rhs: a_rhs,
        });
    }
    let mean = phis.iter().sum::<f64>() / phis.len().max(1) as f64;
    let spread = phis
        .iter()
        .map(|p| (p - mean).abs())
        .fold(0.0, f64::max)
        / mean;
    let max_rel = rows.iter().map(|r| r.relative_residual).fold(0.0, f64::max);
    Ok(RadialResidualReport {
        solution: sol,
        rows,
        max_relative_residual: max_rel,
        gradient_fd_error: gerr,
        hessian_fd_error: herr,
        conjugate_error: cerr,
        fenchel_error: ferr,
        weight_spread: spread,
        alternative_rhs_deviation: alt,
        passed: max_rel <= RADIAL_TOL && gerr <= FD_TOL && herr <= FD_TOL && cerr <= CONJUGATE_TOL,
    })
}
