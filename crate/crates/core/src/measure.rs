//! Even densities on R^{n+1}, weighted facet areas `S^μ_K`, weighted volumes
//! `μ(K)`, the normalizing constant `c_{μ,K}` and the growth diagnostic for
//! `μ(rB)^{β/(n+1)} / r`.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Facet, Polytope};
use crate::quadrature::{unit_interval_rule, Rules};

/// μ(K) at or below this value is treated as zero.
pub const QUADRATURE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Constant(f64),
    /// Standard normal density `e^{-|z|²/2} / (2π)^{d/2}` on R^d.
    Gaussian,
    /// `φ(z) = g(|z|)` with `g` piecewise linear through `(r, g)` nodes,
    /// constant beyond the first and last node.
    RadialProfile(Vec<(f64, f64)>),
}

/// Density `φ` of the measure μ together with the exponent β.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    pub kind: WeightKind,
    pub beta: f64,
}

impl Weight {
    pub fn new(kind: WeightKind, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidWeight(format!("beta must be positive, got {beta}")));
        }
        match &kind {
            WeightKind::Constant(c) if !(c.is_finite() && *c > 0.0) => {
                return Err(Error::InvalidWeight(format!("constant weight must be positive, got {c}")))
            }
            WeightKind::RadialProfile(nodes) => {
                if nodes.len() < 2 {
                    return Err(Error::InvalidWeight("profile needs at least two nodes".into()));
                }
                if nodes.iter().any(|(r, g)| !(r.is_finite() && g.is_finite() && *r >= 0.0 && *g >= 0.0)) {
                    return Err(Error::InvalidWeight("profile nodes must be finite and nonnegative".into()));
                }
                if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidWeight("profile radii must be strictly increasing".into()));
                }
            }
            _ => {}
        }
        Ok(Self { kind, beta })
    }

    pub fn constant(value: f64, beta: f64) -> Result<Self> {
        Self::new(WeightKind::Constant(value), beta)
    }

    pub fn gaussian(beta: f64) -> Result<Self> {
        Self::new(WeightKind::Gaussian, beta)
    }

    pub fn lebesgue(beta: f64) -> Self {
        Self::constant(1.0, beta).expect("positive beta")
    }

    /// Default exponent: 0.4 for constant weights, `1/(2(n+1))` otherwise.
    pub fn default_beta(kind: &WeightKind, n: usize) -> f64 {
        match kind {
            WeightKind::Constant(_) => 0.4,
            _ => 1.0 / (2.0 * (n as f64 + 1.0)),
        }
    }

    /// Checks that apply once the domain dimension `n` is known: a gaussian
    /// weight needs `0 < β < 1/(n+1)`.
    pub fn validate_for_dimension(&self, n: usize) -> Result<()> {
        if matches!(self.kind, WeightKind::Gaussian) && self.beta >= 1.0 / (n as f64 + 1.0) {
            return Err(Error::InvalidWeight(format!(
                "gaussian weight requires 0 < beta < 1/(n+1) = {}, got {}",
                1.0 / (n as f64 + 1.0),
                self.beta
            )));
        }
        Ok(())
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self.kind {
            WeightKind::Constant(c) => Some(c),
            _ => None,
        }
    }

    /// Radial profile `g(r)` with `φ(z) = g(|z|)` on R^d.
    pub fn radial(&self, r: f64, d: usize) -> f64 {
        match &self.kind {
            WeightKind::Constant(c) => *c,
            WeightKind::Gaussian => (-0.5 * r * r).exp() / (2.0 * PI).powf(d as f64 / 2.0),
            WeightKind::RadialProfile(nodes) => interpolate(nodes, r),
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        eval_weight(self, z)
    }
}

fn interpolate(nodes: &[(f64, f64)], r: f64) -> f64 {
    let first = nodes[0];
    let last = nodes[nodes.len() - 1];
    if r <= first.0 {
        return first.1;
    }
    if r >= last.0 {
        return last.1;
    }
    let k = nodes.partition_point(|(x, _)| *x <= r);
    let (r0, g0) = nodes[k - 1];
    let (r1, g1) = nodes[k];
    g0 + (g1 - g0) * (r - r0) / (r1 - r0)
}

/// `φ(z)`, evaluated on the representative of `{z, -z}` whose first nonzero
/// coordinate is positive, so `φ(z) == φ(-z)` holds bit for bit.
pub fn eval_weight(w: &Weight, z: &[f64]) -> f64 {
    if let WeightKind::Constant(c) = w.kind {
        return c;
    }
    let flip = z.iter().find(|c| **c != 0.0).is_some_and(|c| *c < 0.0);
    let mut r2 = 0.0;
    for c in z {
        let c = if flip { -c } else { *c };
        r2 += c * c;
    }
    match &w.kind {
        WeightKind::Gaussian => (-0.5 * r2).exp() / (2.0 * PI).powf(z.len() as f64 / 2.0),
        _ => w.radial(r2.sqrt(), z.len()),
    }
}

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Gauss-Legendre order per direction on each segment, triangle or tetrahedron.
    pub order: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 8,
            mc_samples: 200_000,
            seed: 0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::InvalidInput(format!("quadrature order must be >= 2, got {}", self.order)));
        }
        if self.mc_samples < 1000 {
            return Err(Error::InvalidInput(format!(
                "mc_samples must be >= 1000, got {}",
                self.mc_samples
            )));
        }
        Ok(())
    }

    pub fn rules(&self) -> Rules {
        Rules::new(self.order)
    }
}

/// `∫_F φ dH^n` over a facet, by Gauss-Legendre on each simplex of the facet.
pub fn weighted_facet_area(f: &Facet, w: &Weight, q: &QuadratureSpec) -> f64 {
    weighted_facet_area_with(f, w, &q.rules())
}

pub fn weighted_facet_area_with(f: &Facet, w: &Weight, rules: &Rules) -> f64 {
    if !f.is_active() {
        return 0.0;
    }
    let rule = rules.for_dim(f.normal.dim() - 1);
    f.simplices()
        .iter()
        .map(|s| rule.integrate(s, |z| eval_weight(w, z)))
        .sum()
}

/// Monte Carlo estimate of the weighted facet area: `(mean, standard error)`.
pub fn weighted_facet_area_mc(f: &Facet, w: &Weight, q: &QuadratureSpec) -> (f64, f64) {
    if !f.is_active() {
        return (0.0, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
    let simplices = f.simplices();
    let vols: Vec<f64> = simplices
        .iter()
        .map(|s| crate::linalg::simplex_volume(s))
        .collect();
    let total: f64 = vols.iter().sum();
    let d = f.normal.dim();
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    let mut z = vec![0.0; d];
    for _ in 0..q.mc_samples {
        let mut pick = rng.gen::<f64>() * total;
        let mut k = 0;
        while k + 1 < vols.len() && pick > vols[k] {
            pick -= vols[k];
            k += 1;
        }
        let s = &simplices[k];
        let (a, b) = if s.len() == 2 {
            (rng.gen::<f64>(), 0.0)
        } else {
            let (mut a, mut b) = (rng.gen::<f64>(), rng.gen::<f64>());
            if a + b > 1.0 {
                a = 1.0 - a;
                b = 1.0 - b;
            }
            (a, b)
        };
        for c in 0..d {
            let mut v = s[0][c] + a * (s[1][c] - s[0][c]);
            if s.len() == 3 {
                v += b * (s[2][c] - s[0][c]);
            }
            z[c] = v;
        }
        let val = eval_weight(w, &z);
        sum += val;
        sum2 += val * val;
    }
    let m = q.mc_samples as f64;
    let mean = sum / m;
    let var = (sum2 / m - mean * mean).max(0.0);
    (total * mean, total * (var / m).sqrt())
}

/// `μ(K) = ∫_K φ`, by fanning each facet to the origin.
pub fn mu_volume(k: &Polytope, w: &Weight, q: &QuadratureSpec) -> f64 {
    mu_volume_with(k, w, &q.rules())
}

pub fn mu_volume_with(k: &Polytope, w: &Weight, rules: &Rules) -> f64 {
    let origin = vec![0.0; k.dimension];
    let rule = rules.for_dim(k.dimension);
    let mut total = 0.0;
    for f in &k.facets {
        for s in f.simplices() {
            let mut verts: Vec<&[f64]> = Vec::with_capacity(s.len() + 1);
            verts.push(&origin);
            verts.extend(s);
            total += rule.integrate(&verts, |z| eval_weight(w, z));
        }
    }
    total
}

/// Exponent of `μ(K)` in the constant `c_{μ,K} = μ(K)^{β/(n+1) - 1}`.
pub fn c_exponent(w: &Weight, ambient_dim: usize) -> f64 {
    w.beta / ambient_dim as f64 - 1.0
}

pub fn c_from_mass(mass: f64, w: &Weight, ambient_dim: usize) -> Result<f64> {
    if mass.is_nan() || mass <= QUADRATURE_FLOOR {
        return Err(Error::ZeroMass(mass));
    }
    Ok(mass.powf(c_exponent(w, ambient_dim)))
}

/// `c_{μ,K} = μ(K)^{β/(n+1) - 1}`.
pub fn c_constant(k: &Polytope, w: &Weight, q: &QuadratureSpec) -> Result<f64> {
    c_from_mass(mu_volume(k, w, q), w, k.dimension)
}

/// `μ(rB)` in R^d by radial quadrature.
pub fn mu_ball(w: &Weight, r: f64, d: usize) -> f64 {
    let sphere_area = match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d),
    };
    if let Some(c) = w.is_constant() {
        return c * sphere_area * r.powi(d as i32) / d as f64;
    }
    // panel breakpoints: profile nodes (piecewise polynomial integrand) or a
    // uniform split of the effective support for the gaussian
    let mut breaks = vec![0.0];
    match &w.kind {
        WeightKind::RadialProfile(nodes) => {
            breaks.extend(nodes.iter().map(|(x, _)| *x).filter(|x| *x > 0.0 && *x < r));
        }
        _ => {
            let top = r.min(40.0);
            let panels = 64;
            breaks.extend((1..panels).map(|i| top * i as f64 / panels as f64));
            if top < r {
                breaks.push(top);
            }
        }
    }
    breaks.push(r);
    let rule = unit_interval_rule(16);
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        for &(t, wt) in &rule {
            let s = a + (b - a) * t;
            total += (b - a) * wt * w.radial(s, d) * s.powi(d as i32 - 1);
        }
    }
    sphere_area * total
}

fn gamma_half_integer(d: usize) -> f64 {
    // Γ(d/2)
    if d.is_multiple_of(2) {
        (1..d / 2).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < d as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub r: f64,
    pub mu_ball: f64,
    pub ratio: f64,
}

/// Numerical diagnostic for the growth conditions `μ(rB)^{β/(n+1)}/r → 0` as
/// `r → ∞` and `→ +∞` as `r → 0⁺`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityScan {
    pub rows: Vec<ScanRow>,
    /// Log-log slope of the ratio over the largest radii.
    pub slope_at_infinity: f64,
    /// Log-log slope of the ratio over the smallest radii.
    pub slope_at_zero: f64,
    pub decays_at_infinity: bool,
    pub blows_up_at_zero: bool,
    pub pass: bool,
}

/// Log-log slopes below this count as a genuine trend.
const TREND_SLOPE: f64 = -0.05;

pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).round() as usize;
    (0..=steps)
        .map(|i| lo * 10f64.powf(decades * i as f64 / steps as f64))
        .collect()
}

pub fn default_scan_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 8)
}

pub fn admissibility_scan(w: &Weight, n: usize, r_grid: &[f64]) -> Result<AdmissibilityScan> {
    if r_grid.len() < 8 || r_grid.iter().any(|r| r.is_nan() || *r <= 0.0) || r_grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidInput("scan grid must be increasing positive radii".into()));
    }
    if (r_grid[r_grid.len() - 1] / r_grid[0]).log10() < 4.0 - 1e-9 {
        return Err(Error::InvalidInput("scan grid must span at least four decades".into()));
    }
    let d = n + 1;
    let rows: Vec<ScanRow> = r_grid
        .iter()
        .map(|&r| {
            let m = mu_ball(w, r, d);
            ScanRow {
                r,
                mu_ball: m,
                ratio: m.powf(w.beta / d as f64) / r,
            }
        })
        .collect();
    let window = (rows.len() / 4).max(2);
    let slope = |rs: &[ScanRow]| {
        let first = &rs[0];
        let last = &rs[rs.len() - 1];
        (last.ratio.ln() - first.ratio.ln()) / (last.r.ln() - first.r.ln())
    };
    let strictly_decreasing = |rs: &[ScanRow]| rs.windows(2).all(|p| p[1].ratio < p[0].ratio);
    let tail = &rows[rows.len() - window..];
    let head = &rows[..window];
    let slope_at_infinity = slope(tail);
    let slope_at_zero = slope(head);
    let decays_at_infinity = slope_at_infinity < TREND_SLOPE && strictly_decreasing(tail);
    let blows_up_at_zero = slope_at_zero < TREND_SLOPE && strictly_decreasing(head);
    Ok(AdmissibilityScan {
        rows,
        slope_at_infinity,
        slope_at_zero,
        decays_at_infinity,
        blows_up_at_zero,
        pass: decays_at_infinity && blows_up_at_zero,
    })
}

/// JSON form of a weight: `{"kind", "value"?, "profile"?, "beta"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub kind: WeightKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKindName {
    Gaussian,
    Constant,
    RadialProfile,
}

impl WeightSpec {
    /// Builds the weight for domain dimension `n`, filling in the default β.
    pub fn to_weight(&self, n: usize) -> Result<Weight> {
        let w = self.to_weight_unchecked(n)?;
        w.validate_for_dimension(n)?;
        Ok(w)
    }

    /// As [`WeightSpec::to_weight`] without the dimension-dependent β range check.
    pub fn to_weight_unchecked(&self, n: usize) -> Result<Weight> {
        let kind = match self.kind {
            WeightKindName::Gaussian => {
                if self.value.is_some() || self.profile.is_some() {
                    return Err(Error::InvalidWeight("gaussian weight takes no value or profile".into()));
                }
                WeightKind::Gaussian
            }
            WeightKindName::Constant => {
                if self.profile.is_some() {
                    return Err(Error::InvalidWeight("constant weight takes no profile".into()));
                }
                WeightKind::Constant(self.value.ok_or_else(|| {
                    Error::InvalidWeight("constant weight requires \"value\"".into())
                })?)
            }
            WeightKindName::RadialProfile => {
                if self.value.is_some() {
                    return Err(Error::InvalidWeight("radial_profile weight takes no value".into()));
                }
                let nodes = self.profile.as_ref().ok_or_else(|| {
                    Error::InvalidWeight("radial_profile weight requires \"profile\"".into())
                })?;
                WeightKind::RadialProfile(nodes.iter().map(|p| (p[0], p[1])).collect())
            }
        };
        let beta = self.beta.unwrap_or_else(|| Weight::default_beta(&kind, n));
        Weight::new(kind, beta)
    }

    pub fn from_weight(w: &Weight) -> Self {
        let (kind, value, profile) = match &w.kind {
            WeightKind::Constant(c) => (WeightKindName::Constant, Some(*c), None),
            WeightKind::Gaussian => (WeightKindName::Gaussian, None, None),
            WeightKind::RadialProfile(nodes) => (
                WeightKindName::RadialProfile,
                None,
                Some(nodes.iter().map(|(r, g)| [*r, *g]).collect()),
            ),
        };
        Self {
            kind,
            value,
            profile,
            beta: Some(w.beta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let g = Weight::gaussian(0.25).unwrap();
        assert!((eval_weight(&g, &[0.0, 0.0]) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        let v = eval_weight(&g, &[0.6, -0.8]);
        assert!((v - 0.0965324).abs() < 1e-7);
        let c = Weight::constant(3.0, 0.4).unwrap();
        assert_eq!(eval_weight(&c, &[10.0, -4.0, 2.0]), 3.0);
    }

    #[test]
    fn evenness_is_bitwise() {
        let prof = Weight::new(WeightKind::RadialProfile(vec![(0.0, 2.0), (1.0, 0.5), (3.0, 0.0)]), 0.2).unwrap();
        let g = Weight::gaussian(0.1).unwrap();
        let pts = [[0.3, -1.7, 0.11], [-0.0, 2.5, -1e-3], [1e-300, -7.0, 3.0]];
        for w in [&prof, &g] {
            for p in &pts {
                let m = [-p[0], -p[1], -p[2]];
                assert_eq!(eval_weight(w, p).to_bits(), eval_weight(w, &m).to_bits());
            }
        }
    }

    #[test]
    fn profile_interpolation() {
        let w = Weight::new(WeightKind::RadialProfile(vec![(0.0, 2.0), (1.0, 0.0)]), 0.2).unwrap();
        assert!((eval_weight(&w, &[0.5, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(eval_weight(&w, &[3.0, 0.0]), 0.0);
    }

    #[test]
    fn invalid_weights() {
        assert!(Weight::constant(-1.0, 0.4).is_err());
        assert!(Weight::gaussian(0.0).is_err());
        assert!(Weight::gaussian(0.5).unwrap().validate_for_dimension(1).is_err());
        assert!(Weight::gaussian(0.3).unwrap().validate_for_dimension(1).is_ok());
        assert!(Weight::gaussian(0.34).unwrap().validate_for_dimension(2).is_err());
        assert!(Weight::new(WeightKind::RadialProfile(vec![(1.0, 1.0), (0.5, 1.0)]), 0.2).is_err());
    }

    #[test]
    fn c_constant_arithmetic() {
        let w = Weight::lebesgue(0.4);
        assert_eq!(c_from_mass(1.0, &w, 2).unwrap(), 1.0);
        assert!((c_from_mass(4.0, &w, 2).unwrap() - 0.3298769776932235).abs() < 1e-15);
        assert!(matches!(c_from_mass(1e-15, &w, 2), Err(Error::ZeroMass(_))));
    }

    #[test]
    fn ball_mass_closed_forms() {
        let g = Weight::gaussian(0.25).unwrap();
        for r in [0.01f64, 0.5, 1.0, 2.0, 7.0, 1000.0] {
            let exact = 1.0 - (-0.5 * r * r).exp();
            assert!((mu_ball(&g, r, 2) - exact).abs() < 1e-13, "r = {r}");
        }
        let c = Weight::lebesgue(0.4);
        assert!((mu_ball(&c, 2.0, 2) - 4.0 * PI).abs() < 1e-12);
        assert!((mu_ball(&c, 1.0, 3) - 4.0 * PI / 3.0).abs() < 1e-12);
        // cone profile g(r) = 1 - r on [0,1] in R^2: 2π ∫ (1-s) s ds = π/3
        let cone = Weight::new(WeightKind::RadialProfile(vec![(0.0, 1.0), (1.0, 0.0)]), 0.2).unwrap();
        assert!((mu_ball(&cone, 5.0, 2) - PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn weight_spec_round_trip() {
        let spec = WeightSpec {
            kind: WeightKindName::RadialProfile,
            value: None,
            profile: Some(vec![[0.0, 1.0], [2.0, 0.0]]),
            beta: None,
        };
        let w = spec.to_weight(1).unwrap();
        assert_eq!(w.beta, 0.25);
        let back = WeightSpec::from_weight(&w);
        assert_eq!(back.to_weight(1).unwrap(), w);
        let bad = WeightSpec {
            kind: WeightKindName::Constant,
            value: None,
            profile: None,
            beta: None,
        };
        assert!(bad.to_weight(1).is_err());
    }
}
