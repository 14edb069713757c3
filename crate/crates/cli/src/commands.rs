//! Subcommand implementations. Each returns the process exit code or a
//! `CliError` carrying one.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wmink::envelope::PwlConvexFunction;
use wmink::geometry::{build_polytope, Direction, Polytope};
use wmink::lift::DirectionalMeasure;
use wmink::measure::{
    admissibility_scan, default_scan_grid, AdmissibilityScan, Weight, WeightSpec,
};
use wmink::minkowski::SolveReport;
use wmink::pipeline::solve_instance;
use wmink::verify::{
    default_radial_grid, radial_gauss_roots, radial_peak, radial_residual, verify_instance,
    verify_parts, RadialResidualReport, RadialRoots, VerificationReport, ATOM_TOL, RADIAL_TOL,
    ROUTE_TOL,
};

use crate::config::{read_json, InstanceConfig, Overrides, WeightConfig};
use crate::exit::{self, CliError};
use crate::render;

#[derive(Serialize)]
struct SolutionOut<'a> {
    input: &'a InstanceConfig,
    c_u: f64,
    polytope: &'a Polytope,
    u: &'a PwlConvexFunction,
    w: &'a PwlConvexFunction,
    solve_report: &'a SolveReport,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FacetRecord {
    normal: Vec<f64>,
    support: f64,
    #[allow(dead_code)]
    vertex_indices: Vec<usize>,
    #[allow(dead_code)]
    area: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeRecord {
    #[allow(dead_code)]
    dimension: usize,
    #[allow(dead_code)]
    vertices: Vec<Vec<f64>>,
    facets: Vec<FacetRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionIn {
    input: InstanceConfig,
    c_u: f64,
    polytope: PolytopeRecord,
    u: PwlConvexFunction,
    #[allow(dead_code)]
    w: PwlConvexFunction,
    solve_report: SolveReport,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes every file or none: all content is rendered before the directory is touched.
fn write_all(out: &Path, files: &[(&str, String)]) -> Result<(), CliError> {
    fs::create_dir_all(out)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", out.display())))?;
    for (name, body) in files {
        let p = out.join(name);
        fs::write(&p, body).map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn gate_weight(w: &Weight, n: usize) -> Result<AdmissibilityScan, CliError> {
    let scan = admissibility_scan(w, n, &default_scan_grid())?;
    if !scan.pass {
        return Err(CliError::new(
            exit::INADMISSIBLE,
            format!(
                "weight rejected: growth conditions fail (log-log slope {:.3} near 0, {:.3} at infinity; both must be negative)",
                scan.slope_at_zero, scan.slope_at_infinity
            ),
        ));
    }
    Ok(scan)
}

pub fn solve(input: &Path, out: &Path, o: &Overrides) -> Result<u8, CliError> {
    let mut cfg: InstanceConfig = read_json(input)?;
    cfg.apply(o);
    let rho = DirectionalMeasure::new(cfg.dimension, cfg.atoms.clone())?;
    let weight = cfg.weight.to_weight(cfg.dimension)?;
    cfg.weight = WeightSpec::from_weight(&weight);
    let opts = cfg.solver.options();
    opts.validate()?;
    cfg.quadrature.validate()?;
    gate_weight(&weight, cfg.dimension)?;

    let inst = solve_instance(&rho, &weight, &cfg.quadrature, &opts)?;
    let report = verify_instance(&inst);

    let solution = SolutionOut {
        input: &cfg,
        c_u: inst.c(),
        polytope: &inst.polytope,
        u: &inst.u,
        w: &inst.w,
        solve_report: &inst.report,
    };
    let mut files = vec![
        ("solution.json", to_json(&solution)),
        ("verification.json", to_json(&report)),
        ("verification.csv", report.csv()),
    ];
    let atoms: Vec<Vec<f64>> = inst.rho.atoms.iter().map(|a| a.x.clone()).collect();
    if cfg.dimension == 1 {
        files.push(("solution.svg", render::svg_planar(&inst.polytope, &inst.u, &atoms)));
    } else {
        files.push(("body_vertices.csv", render::vertices_csv(&inst.polytope)));
        files.push((
            "u_graph.csv",
            render::graph_csv(&inst.u, render::plot_extent(&atoms), 40),
        ));
    }
    write_all(out, &files)?;

    print!("{}", report.table());
    println!(
        "solver: {} after {} iterations, relative residual {:.3e}",
        if inst.report.converged { "converged" } else { "not converged" },
        inst.report.iterations,
        inst.report.relative_residual
    );
    Ok(outcome(inst.report.converged, &report))
}

fn outcome(converged: bool, report: &VerificationReport) -> u8 {
    if converged && report.passed {
        exit::OK
    } else {
        eprintln!(
            "{}",
            if converged {
                "verification failed"
            } else {
                "solver did not converge"
            }
        );
        exit::NOT_CONVERGED
    }
}

pub fn verify(input: &Path, out: Option<&Path>) -> Result<u8, CliError> {
    let sol: SolutionIn = read_json(input)?;
    let cfg = &sol.input;
    let rho = DirectionalMeasure::new(cfg.dimension, cfg.atoms.clone())?;
    let weight = cfg.weight.to_weight(cfg.dimension)?;
    cfg.quadrature.validate()?;
    let normals = sol
        .polytope
        .facets
        .iter()
        .map(|f| Direction::new(f.normal.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let supports: Vec<f64> = sol.polytope.facets.iter().map(|f| f.support).collect();
    let k = build_polytope(&normals, &supports)?;
    let atoms: Vec<(Vec<f64>, f64)> = rho.atoms.iter().map(|a| (a.x.clone(), a.mass)).collect();
    let report = verify_parts(
        &atoms,
        &sol.u,
        &k,
        &weight,
        sol.c_u,
        &cfg.quadrature,
        sol.solve_report.converged,
        ATOM_TOL,
        ROUTE_TOL,
    );
    let dir: PathBuf = match out {
        Some(p) => p.to_path_buf(),
        None => input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    write_all(
        &dir,
        &[
            ("verification.json", to_json(&report)),
            ("verification.csv", report.csv()),
        ],
    )?;
    print!("{}", report.table());
    Ok(outcome(sol.solve_report.converged, &report))
}

#[derive(Serialize)]
struct RadialSummary<'a> {
    a: f64,
    n: usize,
    peak: f64,
    roots: RadialRoots,
    solutions: usize,
    c_u: f64,
    rhs: String,
    alternative_rhs: &'static str,
    residuals: Vec<RadialResidualSummary<'a>>,
}

#[derive(Serialize)]
struct RadialResidualSummary<'a> {
    r: f64,
    csv: &'a str,
    max_relative_residual: f64,
    gradient_fd_error: f64,
    hessian_fd_error: f64,
    conjugate_error: f64,
    fenchel_error: f64,
    weight_spread: f64,
    alternative_rhs_deviation: f64,
    passed: bool,
}

fn radial_csv(rep: &RadialResidualReport) -> String {
    let n = rep.solution.n;
    let mut s: String = (0..n).map(|k| format!("x{},", k + 1)).collect();
    s += "lhs,rhs,relative_residual,alternative_rhs\n";
    for row in &rep.rows {
        for v in &row.x {
            s += &format!("{v:e},");
        }
        s += &format!(
            "{:e},{:e},{:e},{:e}\n",
            row.lhs, row.rhs, row.relative_residual, row.alternative_rhs
        );
    }
    s
}

pub fn radial_demo(a: f64, n: usize, out: &Path) -> Result<u8, CliError> {
    if !(1..=2).contains(&n) {
        return Err(CliError::schema(format!("--n must be 1 or 2, got {n}")));
    }
    let roots = radial_gauss_roots(a, n)?;
    let radii: Vec<f64> = match roots {
        RadialRoots::Two { r1, r2 } => vec![r1, r2],
        RadialRoots::DoubleRoot { r } => vec![r],
        RadialRoots::NoRoot => vec![],
    };
    let grid = default_radial_grid(n);
    let reports = radii
        .iter()
        .map(|&r| radial_residual(r, n, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    let names: Vec<String> = (1..=reports.len()).map(|i| format!("radial_r{i}.csv")).collect();
    let summary = RadialSummary {
        a,
        n,
        peak: radial_peak(n),
        roots,
        solutions: radii.len(),
        c_u: 1.0 / a,
        rhs: format!("(1+|x|^2)^(-{}/2)", n + 2),
        alternative_rhs: "a/sqrt(1+|x|^2)",
        residuals: reports
            .iter()
            .zip(&names)
            .map(|(r, name)| RadialResidualSummary {
                r: r.solution.r,
                csv: name,
                max_relative_residual: r.max_relative_residual,
                gradient_fd_error: r.gradient_fd_error,
                hessian_fd_error: r.hessian_fd_error,
                conjugate_error: r.conjugate_error,
                fenchel_error: r.fenchel_error,
                weight_spread: r.weight_spread,
                alternative_rhs_deviation: r.alternative_rhs_deviation,
                passed: r.passed,
            })
            .collect(),
    };
    let mut files = vec![("radial_summary.json", to_json(&summary))];
    for (rep, name) in reports.iter().zip(&names) {
        files.push((name.as_str(), radial_csv(rep)));
    }
    write_all(out, &files)?;

    let status = match roots {
        RadialRoots::Two { .. } => "two solutions (Two)",
        RadialRoots::DoubleRoot { .. } => "one solution (DoubleRoot)",
        RadialRoots::NoRoot => "no solution (NoRoot)",
    };
    println!("a = {a}, n = {n}, peak = {:.10}: {status}", radial_peak(n));
    for r in &reports {
        println!(
            "  r = {:.15}  u = r*sqrt(1+|x|^2)  c_u = {:.6}  max rel residual = {:.2e}  {}",
            r.solution.r,
            r.solution.c_u,
            r.max_relative_residual,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    if !reports.is_empty() {
        println!(
            "  right-hand side used: {}; a/sqrt(1+|x|^2) is off by up to {:.3} (relative)",
            summary.rhs,
            reports
                .iter()
                .map(|r| r.alternative_rhs_deviation)
                .fold(0.0, f64::max)
        );
    }
    let ok = reports
        .iter()
        .all(|r| r.passed && r.max_relative_residual <= RADIAL_TOL);
    Ok(if ok { exit::OK } else { exit::NOT_CONVERGED })
}

pub struct WeightArgs<'a> {
    pub input: Option<&'a Path>,
    pub kind: Option<wmink::measure::WeightKindName>,
    pub value: Option<f64>,
    pub profile: Option<Vec<[f64; 2]>>,
    pub beta: Option<f64>,
    pub dimension: Option<usize>,
}

pub fn admissibility(args: WeightArgs<'_>, out: Option<&Path>) -> Result<u8, CliError> {
    let mut cfg = match args.input {
        Some(p) => read_json::<WeightConfig>(p)?,
        None => WeightConfig {
            dimension: 1,
            weight: WeightSpec {
                kind: args.kind.ok_or_else(|| {
                    CliError::schema("either --input or --weight is required")
                })?,
                value: None,
                profile: None,
                beta: None,
            },
        },
    };
    if let Some(k) = args.kind {
        cfg.weight.kind = k;
    }
    if args.value.is_some() {
        cfg.weight.value = args.value;
    }
    if args.profile.is_some() {
        cfg.weight.profile = args.profile;
    }
    if args.beta.is_some() {
        cfg.weight.beta = args.beta;
    }
    if let Some(d) = args.dimension {
        cfg.dimension = d;
    }
    if !(1..=2).contains(&cfg.dimension) {
        return Err(CliError::schema(format!(
            "dimension must be 1 or 2, got {}",
            cfg.dimension
        )));
    }
    let w = cfg.weight.to_weight_unchecked(cfg.dimension)?;
    let range = w.validate_for_dimension(cfg.dimension);
    let scan = admissibility_scan(&w, cfg.dimension, &default_scan_grid())?;
    println!("{:>12}  {:>14}  {:>14}", "r", "mu(rB)", "ratio");
    for row in &scan.rows {
        println!("{:>12.4e}  {:>14.6e}  {:>14.6e}", row.r, row.mu_ball, row.ratio);
    }
    println!(
        "r -> 0:   slope {:+.4}  {}",
        scan.slope_at_zero,
        if scan.blows_up_at_zero { "PASS (ratio -> +inf)" } else { "FAIL" }
    );
    println!(
        "r -> inf: slope {:+.4}  {}",
        scan.slope_at_infinity,
        if scan.decays_at_infinity { "PASS (ratio -> 0)" } else { "FAIL" }
    );
    if let Err(e) = &range {
        println!("beta range: FAIL ({e})");
    }
    let pass = scan.pass && range.is_ok();
    println!("{}", if pass { "PASS" } else { "FAIL" });
    if let Some(dir) = out {
        write_all(dir, &[("admissibility.json", to_json(&scan))])?;
    }
    Ok(if pass { exit::OK } else { exit::INADMISSIBLE })
}

#[cfg(test)]
mod tests {
    use wmink::measure::QuadratureSpec;

    #[test]
    fn quadrature_spec_round_trips() {
        let q = QuadratureSpec::default();
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(serde_json::from_str::<QuadratureSpec>(&s).unwrap(), q);
    }
}
