//! Input schemas and strict parsing with located diagnostics.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wmink::lift::Atom;
use wmink::measure::{QuadratureSpec, WeightSpec};
use wmink::minkowski::SolveOptions;

use crate::exit::CliError;

/// Solver settings accepted in the input file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_tol() -> f64 {
    SolveOptions::default().tol
}

fn default_max_iters() -> usize {
    SolveOptions::default().max_iters
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iters: default_max_iters(),
        }
    }
}

impl SolverSection {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            max_iters: self.max_iters,
            ..SolveOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub dimension: usize,
    pub atoms: Vec<Atom>,
    pub weight: WeightSpec,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub dimension: usize,
    pub weight: WeightSpec,
}

/// Command-line overrides shared by the subcommands that solve.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub beta: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub quad_order: Option<usize>,
    pub seed: Option<u64>,
}

impl InstanceConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(b) = o.beta {
            self.weight.beta = Some(b);
        }
        if let Some(t) = o.tol {
            self.solver.tol = t;
        }
        if let Some(m) = o.max_iters {
            self.solver.max_iters = m;
        }
        if let Some(q) = o.quad_order {
            self.quadrature.order = q;
        }
        if let Some(s) = o.seed {
            self.quadrature.seed = s;
        }
    }
}

/// Parses JSON text, reporting the field path and line/column of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let field = if path.is_empty() || path == "." {
            String::new()
        } else {
            format!(" at field `{path}`")
        };
        CliError::schema(format!(
            "{origin}: line {}, column {}{field}: {inner}",
            inner.line(),
            inner.column()
        ))
    })?;
    Ok(value)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_located() {
        let text = "{\n  \"dimension\": 1,\n  \"atoms\": [{\"x\": [0.0], \"mass\": 1.0, \"colour\": 3}],\n  \"weight\": {\"kind\": \"gaussian\"}\n}";
        let err = parse_json::<InstanceConfig>(text, "in.json").unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("line 3"), "{}", err.message);
        assert!(err.message.contains("atoms[0]"), "{}", err.message);
        assert!(err.message.contains("colour"), "{}", err.message);
    }

    #[test]
    fn defaults_fill_in() {
        let text = r#"{"dimension": 1, "atoms": [{"x": [0.0], "mass": 1.0}], "weight": {"kind": "gaussian"}}"#;
        let c: InstanceConfig = parse_json(text, "in.json").unwrap();
        assert_eq!(c.solver, SolverSection::default());
        assert_eq!(c.quadrature, QuadratureSpec::default());
    }

    #[test]
    fn overrides_apply() {
        let text = r#"{"dimension": 1, "atoms": [{"x": [0.0], "mass": 1.0}], "weight": {"kind": "gaussian", "beta": 0.2}}"#;
        let mut c: InstanceConfig = parse_json(text, "in.json").unwrap();
        c.apply(&Overrides {
            beta: Some(0.1),
            tol: Some(1e-6),
            max_iters: Some(5),
            quad_order: Some(4),
            seed: Some(9),
        });
        assert_eq!(c.weight.beta, Some(0.1));
        assert_eq!(c.solver.options().max_iters, 5);
        assert_eq!(c.quadrature.order, 4);
        assert_eq!(c.quadrature.seed, 9);
    }
}
