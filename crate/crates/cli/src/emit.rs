//! Byte-exact emitters for heatmaps (CSV, plain PGM) and JSON helpers.

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use qfc_core::numerics::ComplexMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct HeatmapImage {
    width: usize,
    height: usize,
    cells: Vec<f64>,
}

impl HeatmapImage {
    /// Row-major cells; all must be finite and nonnegative.
    pub fn new(width: usize, height: usize, cells: Vec<f64>) -> Result<Self, String> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(format!("{} cells do not fill a {width}x{height} image", cells.len()));
        }
        if cells.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err("heatmap cells must be finite and nonnegative".into());
        }
        Ok(Self { width, height, cells })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, String> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err("ragged heatmap rows".into());
        }
        Self::new(width, height, rows.concat())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn max(&self) -> f64 {
        self.cells.iter().copied().fold(0.0, f64::max)
    }

    fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.cells.chunks(self.width)
    }
}

/// C `%.12e`: twelve fractional digits, signed exponent of at least two
/// digits.
pub fn format_sci(x: f64) -> String {
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn heatmap_csv(img: &HeatmapImage) -> String {
    let mut out = String::new();
    for row in img.rows() {
        let line: Vec<String> = row.iter().map(|&x| format_sci(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Plain P2 with maxval 255 and cells `round(255 x / max)`.
pub fn heatmap_pgm(img: &HeatmapImage) -> String {
    let max = img.max();
    let mut out = format!("P2\n{} {}\n255\n", img.width, img.height);
    for row in img.rows() {
        let line: Vec<String> = row
            .iter()
            .map(|&x| if max > 0.0 { (255.0 * x / max).round() as u32 } else { 0 }.to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

/// `{"dims": [rows, cols], "matrix": [[[re, im], ...], ...]}`.
pub fn complex_matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> =
        (0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(|&z| complex_json(z)).collect())).collect();
    json!({ "dims": [m.rows(), m.cols()], "matrix": rows })
}

pub fn real_matrix_json(rows: &[Vec<f64>]) -> Value {
    json!({ "dims": [rows.len(), rows.first().map_or(0, Vec::len)], "matrix": rows })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable value");
    s.push('\n');
    s
}
