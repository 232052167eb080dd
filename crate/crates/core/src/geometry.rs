//! Convex polygons in the complex plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Convex polygon, vertices counter-clockwise. May degenerate to a segment or a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    pub vertices: Vec<Complex64>,
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Andrew's monotone chain.
pub fn convex_hull(points: &[Complex64]) -> ConvexPolygon {
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup_by(|a, b| (*a - *b).norm() <= 1e-15);
    if pts.len() <= 2 {
        return ConvexPolygon { vertices: pts };
    }
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    ConvexPolygon { vertices: hull }
}

impl ConvexPolygon {
    /// Polygon cut out by the half-planes Re(e^{−iθ_k} z) ≤ h_k. The angles
    /// must be sorted, cover the circle, and consecutive gaps must be below π.
    pub fn from_supporting_lines(lines: &[(f64, f64)]) -> ConvexPolygon {
        let m = lines.len();
        let mut vertices = Vec::with_capacity(m);
        for k in 0..m {
            let (t1, h1) = lines[k];
            let (t2, h2) = lines[(k + 1) % m];
            // cos t1 x + sin t1 y = h1, cos t2 x + sin t2 y = h2
            let det = (t2 - t1).sin();
            let x = (h1 * t2.sin() - h2 * t1.sin()) / det;
            let y = (h2 * t1.cos() - h1 * t2.cos()) / det;
            vertices.push(Complex64::new(x, y));
        }
        ConvexPolygon { vertices }
    }

    pub fn support(&self, theta: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, -theta);
        self.vertices.iter().map(|v| (rot * v).re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Euclidean distance from `p` to the polygon (zero inside).
    pub fn distance(&self, p: Complex64) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => (p - self.vertices[0]).norm(),
            2 => segment_distance(p, self.vertices[0], self.vertices[1]),
            m => {
                let inside = (0..m).all(|k| cross(self.vertices[k], self.vertices[(k + 1) % m], p) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..m)
                        .map(|k| segment_distance(p, self.vertices[k], self.vertices[(k + 1) % m]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    pub fn max_modulus(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// sup over points of `self` of the distance to `other`.
    pub fn excess_over(&self, other: &ConvexPolygon) -> f64 {
        self.vertices.iter().map(|&v| other.distance(v)).fold(0.0, f64::max)
    }
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Hausdorff distance between two convex polygons.
pub fn hausdorff(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    a.excess_over(b).max(b.excess_over(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let h = convex_hull(&[c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.), c(0.5, 0.5)]);
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.distance(c(0.5, 0.5)), 0.0);
        assert!((h.distance(c(2.0, 0.5)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_hulls() {
        assert_eq!(convex_hull(&[c(2., 0.); 5]).vertices.len(), 1);
        let seg = convex_hull(&[c(0., 0.), c(1., 0.), c(0.5, 0.)]);
        assert_eq!(seg.vertices.len(), 2);
        assert!((seg.distance(c(0.5, 1.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn supporting_lines_of_unit_disk() {
        let m = 8;
        let lines: Vec<(f64, f64)> = (0..m).map(|k| (2.0 * PI * k as f64 / m as f64, 1.0)).collect();
        let outer = ConvexPolygon::from_supporting_lines(&lines);
        let r = 1.0 / (PI / m as f64).cos();
        for v in &outer.vertices {
            assert!((v.norm() - r).abs() < 1e-12);
        }
        let inner = convex_hull(&lines.iter().map(|&(t, _)| Complex64::from_polar(1.0, t)).collect::<Vec<_>>());
        assert!((hausdorff(&inner, &outer) - (r - (PI / m as f64).cos())).abs() < 1e-12);
    }
}
