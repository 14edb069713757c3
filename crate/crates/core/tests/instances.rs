//! Cross-module checks on solved instances.

mod common;

use std::f64::consts::PI;

use common::{dir, random_measure, rng};
use wmink::envelope::{subgradient_polytope, ConvexDomain};
use wmink::geometry::{build_polytope, facet_for_normal, lower_envelope, Direction};
use wmink::lift::{lift_point, Atom, DirectionalMeasure};
use wmink::linalg::{dist, norm};
use wmink::measure::{QuadratureSpec, Weight};
use wmink::minkowski::{solve_minkowski, MinkowskiTarget, SolveOptions};
use wmink::pipeline::solve_instance;
use wmink::verify::{ma_measure_atom, verify_instance, verify_instance_with};

fn gaussian(n: usize) -> Weight {
    Weight::gaussian(0.5 / (n as f64 + 1.0)).unwrap()
}

#[test]
fn equiangular_gaussian_target_gives_a_regular_polygon() {
    let m = 4;
    let reps: Vec<Direction> = (0..m)
        .map(|i| {
            let t = PI * i as f64 / m as f64 + 0.1;
            dir(&[t.cos(), t.sin()])
        })
        .collect();
    let t = MinkowskiTarget::from_representatives(&reps, &vec![0.3; m]).unwrap();
    let rep = solve_minkowski(&t, &gaussian(1), &QuadratureSpec::default(), &SolveOptions::default())
        .unwrap();
    assert!(rep.converged);
    let h0 = rep.h[0];
    assert!(rep.h.iter().all(|h| (h - h0).abs() <= 1e-8));
    assert!(rep
        .energy_trace
        .windows(2)
        .all(|p| p[1] >= p[0] - 1e-12 * p[0].abs()));

    let doubled = solve_minkowski(
        &t.scaled(2.0),
        &gaussian(1),
        &QuadratureSpec::default(),
        &SolveOptions::default(),
    )
    .unwrap();
    assert!(doubled.converged);
    assert!((doubled.h[0] - h0).abs() > 1e-4);
    assert!((doubled.h[0] - h0 / 2.0).abs() > 1e-4);
}

#[test]
fn subgradient_at_an_atom_is_the_projected_facet() {
    let mut r = rng(9);
    for n in [1usize, 2] {
        let rho = random_measure(&mut r, n, 6);
        let inst = solve_instance(&rho, &gaussian(n), &QuadratureSpec::default(), &SolveOptions::default())
            .unwrap();
        assert!(inst.report.converged);
        for a in &inst.rho.atoms {
            let facet = facet_for_normal(&inst.polytope, &lift_point(&a.x)).unwrap();
            let proj: Vec<Vec<f64>> = facet.vertices.iter().map(|v| v[..n].to_vec()).collect();
            let sub = subgradient_polytope(&inst.u, &a.x).unwrap();
            assert_eq!(proj.len(), sub.len());
            for p in &proj {
                assert!(sub.iter().any(|s| dist(s, p) <= 1e-8));
            }
        }
        // coercivity along rays
        let eps = inst.w.domain.as_ref().unwrap().inradius_about_origin() - 1e-5;
        assert!(eps > 0.0);
        for k in 0..100 {
            let th = 2.0 * PI * k as f64 / 100.0;
            let x: Vec<f64> = if n == 1 {
                vec![if k % 2 == 0 { 1e6 } else { -1e6 }]
            } else {
                vec![1e6 * th.cos(), 1e6 * th.sin()]
            };
            assert!(inst.u.eval(&x) / norm(&x) >= eps);
        }
        // u(0) = -min_K t >= -w(0) > 0
        let zero = vec![0.0; n];
        let lowest = inst.polytope.vertices.iter().map(|v| v[n]).fold(f64::INFINITY, f64::min);
        assert!((inst.u.eval(&zero) + lowest).abs() < 1e-12);
        assert!(inst.u.eval(&zero) >= -inst.w.eval(&zero) - 1e-12);
        assert!(-inst.w.eval(&zero) > 0.0);
    }
}

#[test]
fn disk_polygon_gives_radial_functions() {
    let r = 1.3;
    let m = 512;
    let normals: Vec<Direction> = (0..m)
        .map(|i| {
            let t = 2.0 * PI * (i as f64 + 0.5) / m as f64;
            dir(&[t.cos(), t.sin()])
        })
        .collect();
    let k = build_polytope(&normals, &vec![r; m]).unwrap();
    let u = wmink::envelope::build_u(&k);
    let w = lower_envelope(&k).unwrap();
    // circumscribed polygon: vertices at radius r/cos(π/m)
    let slack = r * (1.0 / (PI / m as f64).cos() - 1.0);
    for y in [-2.0, -0.5, 0.0, 0.7, 3.0] {
        let exact = r * (1.0f64 + y * y).sqrt();
        let got = u.eval(&[y]);
        assert!(got >= exact - 1e-12 && got <= exact + slack * (1.0f64 + y * y).sqrt() + 1e-12);
    }
    for x in [-1.2, -0.3, 0.0, 0.9] {
        let exact = -(r * r - x * x).sqrt();
        assert!((w.eval(&[x]) - exact).abs() <= 2.0 * slack + 1e-3 * (r - x.abs()).recip() * slack);
    }
}

#[test]
fn scaling_masses_keeps_verification_passing() {
    let mut r = rng(31);
    let rho = random_measure(&mut r, 1, 5);
    for t in [1.0, 0.3, 4.0] {
        let inst = solve_instance(
            &rho.scaled(t),
            &gaussian(1),
            &QuadratureSpec::default(),
            &SolveOptions::default(),
        )
        .unwrap();
        let v = verify_instance(&inst);
        assert!(v.passed, "t = {t}\n{}", v.table());
        assert!((v.total_omega - v.total_mass).abs() <= 1e-6 * v.total_mass);
    }
}

#[test]
fn atom_at_origin_has_unit_normal_factor() {
    let rho = DirectionalMeasure::new(
        2,
        vec![
            Atom { x: vec![0.0, 0.0], mass: 1.0 },
            Atom { x: vec![1.0, 0.0], mass: 0.5 },
            Atom { x: vec![0.0, 1.0], mass: 0.5 },
            Atom { x: vec![-1.0, -1.0], mass: 0.7 },
        ],
    )
    .unwrap();
    let q = QuadratureSpec::default();
    let inst = solve_instance(&rho, &gaussian(2), &q, &SolveOptions::default()).unwrap();
    assert!(inst.report.converged);
    let am = ma_measure_atom(&inst.u, &inst.polytope, &inst.weight, inst.c(), &[0.0, 0.0], &q).unwrap();
    assert_eq!(am.normal_factor, 1.0);
    assert!((am.change_of_variables - inst.c() * am.facet_area).abs() < 1e-15);
    assert!(am.route_disagreement() < 1e-7);
    let v = verify_instance_with(&inst, 1e-6, 1e-7);
    assert!(v.passed, "{}", v.table());
}

#[test]
fn constant_weight_uses_lebesgue_areas() {
    let mut r = rng(5);
    let rho = random_measure(&mut r, 2, 5);
    let w = Weight::constant(1.0, 0.4).unwrap();
    let q = QuadratureSpec::default();
    let inst = solve_instance(&rho, &w, &q, &SolveOptions::default()).unwrap();
    assert!(inst.report.converged);
    for a in &inst.rho.atoms {
        let f = facet_for_normal(&inst.polytope, &lift_point(&a.x)).unwrap();
        let am = ma_measure_atom(&inst.u, &inst.polytope, &w, inst.c(), &a.x, &q).unwrap();
        let expect = inst.c() * f.area / (1.0 + a.x.iter().map(|c| c * c).sum::<f64>()).sqrt();
        assert!((am.change_of_variables - expect).abs() <= 1e-12 * expect);
    }
}

#[test]
fn domain_inradius_of_a_square() {
    let d = ConvexDomain::hull_of(&[
        vec![1.0, 1.0],
        vec![-1.0, 1.0],
        vec![-1.0, -1.0],
        vec![1.0, -1.0],
    ])
    .unwrap();
    assert!((d.inradius_about_origin() - 1.0).abs() < 1e-12);
}

#[test]
fn invalid_inputs_are_rejected() {
    let q = QuadratureSpec::default();
    let one = DirectionalMeasure::new(1, vec![Atom { x: vec![0.3], mass: 1.0 }]).unwrap();
    assert!(matches!(
        solve_instance(&one, &gaussian(1), &q, &SolveOptions::default()),
        Err(wmink::Error::ConcentratedOnHyperplane { .. })
    ));
    let mut r = rng(1);
    let rho = random_measure(&mut r, 1, 4);
    let bad = Weight::gaussian(0.6).unwrap();
    assert!(matches!(
        solve_instance(&rho, &bad, &q, &SolveOptions::default()),
        Err(wmink::Error::InvalidWeight(_))
    ));
    let q0 = QuadratureSpec { order: 0, ..q };
    assert!(solve_instance(&rho, &gaussian(1), &q0, &SolveOptions::default()).is_err());
}
