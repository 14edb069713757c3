use thiserror::Error;

/// Errors produced by the geometry, measure and solver layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("normals do not positively span the ambient space; the intersection is unbounded")]
    UnboundedBody,

    #[error("dual points are affinely dependent; the hull is degenerate")]
    DegenerateHull,

    #[error("normal {0:?} is not one of the construction normals")]
    UnknownNormal(Vec<f64>),

    #[error("body has no facet with a downward normal")]
    NoLowerFacets,

    #[error("point {0:?} lies outside the effective domain")]
    OutsideDomain(Vec<f64>),

    #[error("weighted volume {0:e} is below the quadrature floor")]
    ZeroMass(f64),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("measure is concentrated on an affine hyperplane (the lifted normals span only a {rank}-dimensional subspace of R^{ambient})")]
    ConcentratedOnHyperplane { rank: usize, ambient: usize },

    #[error("solver did not converge after {iterations} iterations (relative residual {relative_residual:e})")]
    NotConverged {
        iterations: usize,
        relative_residual: f64,
    },

    #[error("support value collapsed below {floor:e} for normal pair {pair}")]
    CollapsedBody { pair: usize, floor: f64 },

    #[error("facet for atom {0:?} has no area; the solve is probably not converged")]
    EmptySubgradientFacet(Vec<f64>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
