//! File formats: matrix input JSON, result JSON with fixed float formatting,
//! boundary CSV, and SVG plots.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::matcore::Matrix;
use crate::range::RangeBoundary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for WireComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<WireComplex> for Complex64 {
    fn from(w: WireComplex) -> Self {
        Complex64::new(w.re, w.im)
    }
}

/// `{"n": int, "rows": [[{"re": .., "im": ..}, ..], ..]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub rows: Vec<Vec<WireComplex>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &Matrix) -> Self {
        let n = m.dim();
        Self { n, rows: (0..n).map(|i| m.row(i).iter().map(|&z| z.into()).collect()).collect() }
    }

    pub fn into_matrix(self) -> Result<Matrix> {
        if self.rows.len() != self.n {
            return Err(Error::DimensionMismatch(format!("n = {} but {} rows", self.n, self.rows.len())));
        }
        let rows: Vec<Vec<Complex64>> =
            self.rows.into_iter().map(|r| r.into_iter().map(Complex64::from).collect()).collect();
        Matrix::from_complex_rows(&rows)
    }
}

pub fn parse_matrix_str(text: &str) -> Result<Matrix> {
    let file: MatrixFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    file.into_matrix()
}

pub fn parse_matrix(path: &Path) -> Result<Matrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix_str(&text)
}

pub fn matrix_to_json(m: &Matrix) -> String {
    to_json_string(&serde_json::to_value(MatrixFile::from_matrix(m)).expect("plain data"))
}

/// Floats as 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with every float written by [`format_float`], so identical
/// values always produce identical bytes.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| {
        for _ in 0..d {
            out.push_str("  ");
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short scalar arrays on one line
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, depth + 1);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            if map.values().all(|x| x.is_number()) && map.len() <= 2 {
                out.push('{');
                for (k, (key, x)) in map.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&Value::String(key.clone()).to_string());
                    out.push_str(": ");
                    write_value(out, x, depth + 1);
                }
                out.push('}');
                return;
            }
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, depth + 1);
                if k + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// `theta,support,re,im` per direction; the point is the witness on the supporting line.
pub fn boundary_csv(b: &RangeBoundary) -> String {
    let mut out = String::from("theta,support,re,im\n");
    for s in &b.samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_float(s.theta),
            format_float(s.value),
            format_float(s.witness_point.re),
            format_float(s.witness_point.im)
        );
    }
    out
}

const SVG_SIZE: f64 = 800.0;
const SVG_MARGIN: f64 = 40.0;

/// Static 800×800 plot: inner hull solid, outer polygon dashed, witnesses as dots.
pub fn boundary_svg(b: &RangeBoundary) -> String {
    let pts = b.outer.vertices.iter().chain(&b.inner.vertices);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let scale = (SVG_SIZE - 2.0 * SVG_MARGIN) / span;
    let map = |z: Complex64| (SVG_SIZE / 2.0 + (z.re - cx) * scale, SVG_SIZE / 2.0 - (z.im - cy) * scale);
    let path = |poly: &ConvexPolygon| {
        poly.vertices
            .iter()
            .map(|&z| {
                let (x, y) = map(z);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#);
    let _ = writeln!(out, r#"<rect width="800" height="800" fill="white"/>"#);
    // axes through the origin when it is in view
    let (ox, oy) = map(Complex64::new(0.0, 0.0));
    if (0.0..=SVG_SIZE).contains(&ox) {
        let _ = writeln!(out, r##"<line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="800" stroke="#bbb"/>"##);
    }
    if (0.0..=SVG_SIZE).contains(&oy) {
        let _ = writeln!(out, r##"<line x1="0" y1="{oy:.3}" x2="800" y2="{oy:.3}" stroke="#bbb"/>"##);
    }
    let _ = writeln!(
        out,
        r##"<polygon points="{}" fill="none" stroke="#c33" stroke-width="1.5" stroke-dasharray="6,4"/>"##,
        path(&b.outer)
    );
    let _ = writeln!(
        out,
        r##"<polygon points="{}" fill="#36c" fill-opacity="0.15" stroke="#36c" stroke-width="1.5"/>"##,
        path(&b.inner)
    );
    for s in &b.samples {
        let (x, y) = map(s.witness_point);
        let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="#123"/>"##);
    }
    let _ = writeln!(
        out,
        r##"<text x="10" y="20" font-family="monospace" font-size="12">x: [{:.4}, {:.4}]  y: [{:.4}, {:.4}]</text>"##,
        cx - span / 2.0,
        cx + span / 2.0,
        cy - span / 2.0,
        cy + span / 2.0
    );
    out.push_str("</svg>\n");
    out
}
