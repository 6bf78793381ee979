//! Tables as CSV or JSON and heatmaps as SVG with an embedded PNG raster.

use std::io::{Read, Write};
use std::path::Path;

use base64::Engine as _;

use super::runner::ResultRow;
use crate::error::{Error, Result};
use crate::loss::FieldOracle;

pub const CSV_COLUMNS: [&str; 7] = [
    "m_tilde",
    "m_bar",
    "loss",
    "seed",
    "rel_h1_error",
    "final_loss",
    "wall_s",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv(rows: &[ResultRow], out: impl Write) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyField);
    }
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

pub fn table_csv(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn table_json(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyField);
    }
    serde_json::to_string_pretty(rows).map_err(|e| Error::Io(e.to_string()))
}

/// Values of `v` at the `n x n` cell centres, row 0 at the top (`y` near 1).
pub fn raster(v: &impl FieldOracle, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * n);
    for row in 0..n {
        let y = 1.0 - (row as f64 + 0.5) / n as f64;
        for col in 0..n {
            out.push(v.value(&[(col as f64 + 0.5) / n as f64, y]));
        }
    }
    out
}

/// Linear blue-white-red colour map on `[0, 1]`.
pub fn colour(t: f64) -> [u8; 3] {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.5 };
    let lerp = |a: f64, b: f64, s: f64| (a + (b - a) * s).round() as u8;
    if t < 0.5 {
        let s = t / 0.5;
        [lerp(33.0, 247.0, s), lerp(102.0, 247.0, s), lerp(172.0, 247.0, s)]
    } else {
        let s = (t - 0.5) / 0.5;
        [lerp(247.0, 178.0, s), lerp(247.0, 24.0, s), lerp(247.0, 43.0, s)]
    }
}

/// Position of `x` on the linear scale from `min` to `max`; a constant
/// field maps to the middle.
pub fn scale(x: f64, min: f64, max: f64) -> f64 {
    if max > min {
        (x - min) / (max - min)
    } else {
        0.5
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub n: usize,
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl Heatmap {
    pub fn new(v: &impl FieldOracle, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("raster size must be positive".into()));
        }
        let values = raster(v, n);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Heatmap { n, values, min, max })
    }

    pub fn pixels(&self) -> Vec<u8> {
        self.values
            .iter()
            .flat_map(|&x| colour(scale(x, self.min, self.max)))
            .collect()
    }

    pub fn png(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut buf, self.n as u32, self.n as u32);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().map_err(|e| Error::Io(e.to_string()))?;
            w.write_image_data(&self.pixels())
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        Ok(buf)
    }

    pub fn svg(&self, title: &str) -> Result<String> {
        let data = base64::engine::general_purpose::STANDARD.encode(self.png()?);
        let size = 400;
        let bar_lo = colour(0.0);
        let bar_hi = colour(1.0);
        let hex = |c: [u8; 3]| format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
        Ok(format!(
            r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
  <title>{title}</title>
  <image x="10" y="30" width="{size}" height="{size}" preserveAspectRatio="none" style="image-rendering:pixelated" href="data:image/png;base64,{data}"/>
  <text x="10" y="20" font-family="sans-serif" font-size="14">{title}</text>
  <defs><linearGradient id="bar" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="{lo}"/><stop offset="0.5" stop-color="#f7f7f7"/><stop offset="1" stop-color="{hi}"/></linearGradient></defs>
  <rect x="{bx}" y="30" width="20" height="{size}" fill="url(#bar)" stroke="black"/>
  <text x="{tx}" y="40" font-family="sans-serif" font-size="12">max {max:.6e}</text>
  <text x="{tx}" y="{ty}" font-family="sans-serif" font-size="12">min {min:.6e}</text>
</svg>
"##,
            w = size + 160,
            h = size + 40,
            bx = size + 20,
            tx = size + 45,
            ty = size + 30,
            lo = hex(bar_lo),
            hi = hex(bar_hi),
            min = self.min,
            max = self.max,
        ))
    }
}

pub fn emit_plot(v: &impl FieldOracle, n: usize, title: &str, path: &Path) -> Result<Heatmap> {
    let map = Heatmap::new(v, n)?;
    std::fs::write(path, map.svg(title)?)?;
    Ok(map)
}
