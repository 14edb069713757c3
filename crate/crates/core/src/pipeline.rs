//! End-to-end construction: lift, solve, build `K`, and read off `u` and `w`.

use crate::envelope::{build_u, PwlConvexFunction};
use crate::error::Result;
use crate::geometry::{build_polytope, lower_envelope, Polytope};
use crate::lift::{symmetrized_lift, DirectionalMeasure};
use crate::measure::{QuadratureSpec, Weight};
use crate::minkowski::{solve_minkowski, MinkowskiTarget, SolveOptions, SolveReport};

#[derive(Debug, Clone)]
pub struct SolvedInstance {
    pub rho: DirectionalMeasure,
    pub target: MinkowskiTarget,
    pub weight: Weight,
    pub quadrature: QuadratureSpec,
    pub options: SolveOptions,
    pub report: SolveReport,
    pub polytope: Polytope,
    /// `u = w*`, one affine piece per lower vertex of `K`.
    pub u: PwlConvexFunction,
    /// Lower envelope of `K` on `π(K)`.
    pub w: PwlConvexFunction,
}

impl SolvedInstance {
    pub fn c(&self) -> f64 {
        self.report.c
    }
}

/// Runs the full construction. An unconverged solve still yields an instance;
/// check `report.converged`.
pub fn solve_instance(
    rho: &DirectionalMeasure,
    weight: &Weight,
    quadrature: &QuadratureSpec,
    options: &SolveOptions,
) -> Result<SolvedInstance> {
    weight.validate_for_dimension(rho.dimension)?;
    quadrature.validate()?;
    let target = symmetrized_lift(rho)?;
    let report = solve_minkowski(&target, weight, quadrature, options)?;
    let polytope = build_polytope(&target.normals, &target.expand(&report.h))?;
    let u = build_u(&polytope);
    let w = lower_envelope(&polytope)?;
    Ok(SolvedInstance {
        rho: rho.clone(),
        target,
        weight: weight.clone(),
        quadrature: *quadrature,
        options: *options,
        report,
        polytope,
        u,
        w,
    })
}
