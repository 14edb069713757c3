//! Figure data: SVG for planar bodies, CSV point clouds for solids.

use std::fmt::Write;

use wmink::envelope::PwlConvexFunction;
use wmink::geometry::Polytope;

const PANEL: f64 = 360.0;
const MARGIN: f64 = 20.0;

struct Frame {
    lo: [f64; 2],
    hi: [f64; 2],
    origin: f64,
}

impl Frame {
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let sx = PANEL / (self.hi[0] - self.lo[0]);
        let sy = PANEL / (self.hi[1] - self.lo[1]);
        let s = sx.min(sy);
        (
            self.origin + MARGIN + (p[0] - self.lo[0]) * s,
            MARGIN + PANEL - (p[1] - self.lo[1]) * s,
        )
    }
}

fn polyline(frame: &Frame, pts: &[[f64; 2]], closed: bool, style: &str) -> String {
    let coords: Vec<String> = pts
        .iter()
        .map(|p| {
            let (x, y) = frame.map(*p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let tag = if closed { "polygon" } else { "polyline" };
    format!("  <{tag} points=\"{}\" {style}/>\n", coords.join(" "))
}

/// Half-width of the plotting window for `u`.
pub fn plot_extent(atoms: &[Vec<f64>]) -> f64 {
    let m = atoms
        .iter()
        .flat_map(|x| x.iter().map(|c| c.abs()))
        .fold(0.0, f64::max);
    (1.5 * m).max(2.0)
}

/// Two panels: the body `K` in the plane and the graph of `u` with the atoms marked.
pub fn svg_planar(k: &Polytope, u: &PwlConvexFunction, atoms: &[Vec<f64>]) -> String {
    let mut verts: Vec<[f64; 2]> = k.vertices.iter().map(|v| [v[0], v[1]]).collect();
    verts.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    let r = verts
        .iter()
        .map(|v| v[0].abs().max(v[1].abs()))
        .fold(0.0, f64::max)
        * 1.1;
    let body = Frame {
        lo: [-r, -r],
        hi: [r, r],
        origin: 0.0,
    };

    let x_max = plot_extent(atoms);
    let samples = 400;
    let graph: Vec<[f64; 2]> = (0..=samples)
        .map(|i| {
            let x = -x_max + 2.0 * x_max * i as f64 / samples as f64;
            [x, u.eval(&[x])]
        })
        .collect();
    let y_lo = graph.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min).min(0.0);
    let y_hi = graph.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.05 * (y_hi - y_lo).max(1e-9);
    let span = (y_hi - y_lo + 2.0 * pad).max(2.0 * x_max);
    let plot = Frame {
        lo: [-x_max, y_lo - pad],
        hi: [-x_max + span, y_lo - pad + span],
        origin: PANEL + 2.0 * MARGIN,
    };

    let width = 2.0 * (PANEL + 2.0 * MARGIN);
    let height = PANEL + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    s += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += &polyline(&body, &[[-r, 0.0], [r, 0.0]], false, "stroke=\"#bbb\" fill=\"none\"");
    s += &polyline(&body, &[[0.0, -r], [0.0, r]], false, "stroke=\"#bbb\" fill=\"none\"");
    s += &polyline(&body, &verts, true, "stroke=\"#1f4e79\" fill=\"#dce9f5\" stroke-width=\"1.5\"");
    s += &polyline(&plot, &[[-x_max, 0.0], [x_max, 0.0]], false, "stroke=\"#bbb\" fill=\"none\"");
    s += &polyline(&plot, &graph, false, "stroke=\"#7a1f1f\" fill=\"none\" stroke-width=\"1.5\"");
    for x in atoms {
        let (cx, cy) = plot.map([x[0], u.eval(x)]);
        let _ = writeln!(s, "  <circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"3\" fill=\"#7a1f1f\"/>");
    }
    s += "</svg>\n";
    s
}

pub fn vertices_csv(k: &Polytope) -> String {
    let mut s = String::from("x,y,z\n");
    for v in &k.vertices {
        let _ = writeln!(s, "{:e},{:e},{:e}", v[0], v[1], v[2]);
    }
    s
}

/// `u` on a square grid of `(m + 1)²` points.
pub fn graph_csv(u: &PwlConvexFunction, half_width: f64, m: usize) -> String {
    let mut s = String::from("x1,x2,u\n");
    for i in 0..=m {
        for j in 0..=m {
            let x = [
                -half_width + 2.0 * half_width * i as f64 / m as f64,
                -half_width + 2.0 * half_width * j as f64 / m as f64,
            ];
            let _ = writeln!(s, "{:e},{:e},{:e}", x[0], x[1], u.eval(&x));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmink::envelope::build_u;
    use wmink::geometry::{build_polytope, Direction};

    #[test]
    fn square_svg_has_both_panels() {
        let normals: Vec<Direction> = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
            .iter()
            .map(|v| Direction::new(v.to_vec()).unwrap())
            .collect();
        let k = build_polytope(&normals, &[1.0; 4]).unwrap();
        let u = build_u(&k);
        let svg = svg_planar(&k, &u, &[vec![0.5]]);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
