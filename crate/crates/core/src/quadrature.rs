//! Gauss-Legendre rules and collapsed (Duffy) product rules on simplices.
//!
//! Every rule is normalized so that its weights sum to one: the integral of `f`
//! over a simplex `S` is approximated by `vol(S) * sum_i w_i f(x_i)`.

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule on [0, 1] with weights summing to one.
pub fn unit_interval_rule(order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| (0.5 * (xi + 1.0), 0.5 * wi))
        .collect()
}

/// Rule on the reference k-simplex (k = 1, 2, 3): barycentric coordinates of the
/// non-base vertices and normalized weights.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    pub dim: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    pub fn new(dim: usize, order: usize) -> Self {
        let line = unit_interval_rule(order);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        match dim {
            1 => {
                for &(s, w) in &line {
                    points.push([s, 0.0, 0.0]);
                    weights.push(w);
                }
            }
            2 => {
                // (s, t) -> (s, (1-s) t), jacobian (1-s), reference area 1/2
                for &(s, ws) in &line {
                    for &(t, wt) in &line {
                        points.push([s, (1.0 - s) * t, 0.0]);
                        weights.push(2.0 * ws * wt * (1.0 - s));
                    }
                }
            }
            3 => {
                // jacobian (1-s)^2 (1-t), reference volume 1/6
                for &(s, ws) in &line {
                    for &(t, wt) in &line {
                        for &(r, wr) in &line {
                            points.push([s, (1.0 - s) * t, (1.0 - s) * (1.0 - t) * r]);
                            weights.push(6.0 * ws * wt * wr * (1.0 - s).powi(2) * (1.0 - t));
                        }
                    }
                }
            }
            _ => panic!("simplex rules exist for dimension 1..=3"),
        }
        Self {
            dim,
            points,
            weights,
        }
    }

    /// Integrate `f` over the simplex with vertices `verts` (len = dim + 1),
    /// embedded in an ambient space of dimension `verts[0].len() <= 3`.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, verts: &[&[f64]], f: F) -> f64 {
        debug_assert_eq!(verts.len(), self.dim + 1);
        let vol = crate::linalg::simplex_volume(verts);
        if vol == 0.0 {
            return 0.0;
        }
        let d = verts[0].len();
        let mut z = [0.0; 3];
        let mut acc = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (c, zc) in z.iter_mut().enumerate().take(d) {
                let base = verts[0][c];
                let mut v = base;
                for k in 0..self.dim {
                    v += p[k] * (verts[k + 1][c] - base);
                }
                *zc = v;
            }
            acc += w * f(&z[..d]);
        }
        vol * acc
    }
}

/// Prebuilt rules for segments, triangles and tetrahedra at one order.
#[derive(Debug, Clone)]
pub struct Rules {
    pub order: usize,
    pub segment: SimplexRule,
    pub triangle: SimplexRule,
    pub tetrahedron: SimplexRule,
}

impl Rules {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            segment: SimplexRule::new(1, order),
            triangle: SimplexRule::new(2, order),
            tetrahedron: SimplexRule::new(3, order),
        }
    }

    pub fn for_dim(&self, dim: usize) -> &SimplexRule {
        match dim {
            1 => &self.segment,
            2 => &self.triangle,
            3 => &self.tetrahedron,
            _ => panic!("no rule for simplex dimension {dim}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for order in 2..12 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let approx: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "order {order} deg {deg}");
            }
        }
    }

    #[test]
    fn simplex_rules_integrate_monomials() {
        let r = Rules::new(6);
        // int over reference triangle of x^2 y = 2! 1! / 5! = 1/60
        let tri: [&[f64]; 3] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]];
        let v = r.triangle.integrate(&tri, |z| z[0] * z[0] * z[1]);
        assert!((v - 1.0 / 60.0).abs() < 1e-15);
        // int over reference tet of x y z = 1/720
        let tet: [&[f64]; 4] = [&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]];
        let v = r.tetrahedron.integrate(&tet, |z| z[0] * z[1] * z[2]);
        assert!((v - 1.0 / 720.0).abs() < 1e-15);
        let seg: [&[f64]; 2] = [&[1.0, -1.0], &[1.0, 1.0]];
        let v = r.segment.integrate(&seg, |z| z[1] * z[1]);
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_one() {
        let r = Rules::new(8);
        for rule in [&r.segment, &r.triangle, &r.tetrahedron] {
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }
}
