//! File formats.
//!
//! * LVF: `b"LVF1"`, `u32` Mx, `u32` My, then Mx·My little-endian `f64`
//!   values, row-major with `x` fastest.
//! * CSV: RFC 4180, `.` decimal point, floats with 17 significant digits.
//! * PGM: binary P5, maxval 255, gray `floor(255 (v - lo) / (hi - lo) + 1/2)`
//!   over the field's own range; a constant field maps to 128.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use levyflow_core::frac::{Grid, GridField};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const LVF_MAGIC: &[u8; 4] = b"LVF1";

pub fn encode_lvf(f: &GridField<f64>) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(12 + 8 * g.nodes());
    out.extend_from_slice(LVF_MAGIC);
    out.extend_from_slice(&(g.mx() as u32).to_le_bytes());
    out.extend_from_slice(&(g.my() as u32).to_le_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Decodes an LVF buffer onto a grid with unit spacing (the format does
/// not store lengths). `My = 1` gives a 1D grid.
pub fn decode_lvf(bytes: &[u8]) -> Result<GridField<f64>, CliError> {
    let bad = |m: &str| CliError::Input(format!("bad LVF data: {m}"));
    if bytes.len() < 12 || &bytes[..4] != LVF_MAGIC {
        return Err(bad("missing LVF1 header"));
    }
    let word = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().unwrap()) as usize;
    let (mx, my) = (word(4), word(8));
    if bytes.len() != 12 + 8 * mx * my {
        return Err(bad("length does not match header"));
    }
    let values = bytes[12..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let grid = if my == 1 {
        Grid::new_1d(mx as f64, mx)
    } else {
        Grid::new_2d(mx as f64, my as f64, mx, my)
    }
    .map_err(|e| bad(&e.to_string()))?;
    GridField::new(grid, values).map_err(|e| bad(&e.to_string()))
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV text with CRLF line endings.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

pub enum Cell<'a> {
    Text(&'a str),
    Int(u64),
    Float(f64),
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Self::default();
        c.row(&header.iter().map(|h| Cell::Text(h)).collect::<Vec<_>>());
        c
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let line: Vec<String> = cells
            .iter()
            .map(|c| match c {
                Cell::Text(s) => csv_field(s),
                Cell::Int(n) => n.to_string(),
                Cell::Float(v) => fmt_f64(*v),
            })
            .collect();
        self.text.push_str(&line.join(","));
        self.text.push_str("\r\n");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// Grid as CSV, one row per `y` index.
pub fn grid_csv(f: &GridField<f64>) -> Vec<u8> {
    let g = f.grid();
    let mut text = String::new();
    for j in 0..g.my() {
        let row: Vec<String> = (0..g.mx()).map(|i| fmt_f64(f.at(i, j))).collect();
        text.push_str(&row.join(","));
        text.push_str("\r\n");
    }
    text.into_bytes()
}

/// Grids up to this many nodes also get a CSV mirror.
pub const CSV_MIRROR_NODES: usize = 4096;

pub fn gray_level(v: f64, lo: f64, hi: f64) -> u8 {
    if !(hi > lo) {
        return 128;
    }
    let s = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    (255.0 * s + 0.5).floor() as u8
}

/// P5 image, first row is `y` index 0.
pub fn encode_pgm(f: &GridField<f64>) -> Vec<u8> {
    let g = f.grid();
    let (lo, hi) = value_range(f);
    let mut out = format!("P5\n{} {}\n255\n", g.mx(), g.my()).into_bytes();
    out.extend(f.values().iter().map(|&v| gray_level(v, lo, hi)));
    out
}

pub fn value_range(f: &GridField<f64>) -> (f64, f64) {
    f.values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
}

/// Marching-squares segments of the level set `{f = level}` in index
/// coordinates (node `(i, j)` sits at `(i, j)`), without periodic wrap.
pub fn contour_segments(f: &GridField<f64>, level: f64) -> Vec<[f64; 4]> {
    let g = f.grid();
    let mut segs = Vec::new();
    if g.my() < 2 {
        return segs;
    }
    let cross = |a: f64, b: f64| (level - a) / (b - a);
    for j in 0..g.my() - 1 {
        for i in 0..g.mx() - 1 {
            // corners counter-clockwise from (i, j)
            let c = [f.at(i, j), f.at(i + 1, j), f.at(i + 1, j + 1), f.at(i, j + 1)];
            let pos = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
            let mut pts = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (c[e], c[(e + 1) % 4]);
                if (a < level) != (b < level) {
                    let s = cross(a, b);
                    let (p, q) = (pos[e], pos[(e + 1) % 4]);
                    pts.push((i as f64 + p.0 + s * (q.0 - p.0), j as f64 + p.1 + s * (q.1 - p.1)));
                }
            }
            match pts.len() {
                2 => segs.push([pts[0].0, pts[0].1, pts[1].0, pts[1].1]),
                4 => {
                    // saddle: the cell mean decides which corner pair is joined
                    let mean = c.iter().sum::<f64>() / 4.0;
                    let pairs = if (mean < level) == (c[0] < level) {
                        [(0, 1), (2, 3)]
                    } else {
                        [(3, 0), (1, 2)]
                    };
                    for (u, v) in pairs {
                        segs.push([pts[u].0, pts[u].1, pts[v].0, pts[v].1]);
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub base_seed: u64,
    /// Resolved configuration as TOML.
    pub config: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<OutputEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Output directory that records what it writes.
pub struct OutDir {
    root: PathBuf,
    entries: Vec<OutputEntry>,
}

impl OutDir {
    pub fn create(root: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&root).map_err(|e| CliError::Io(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root,
            entries: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
        }
        let mut file = fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        file.write_all(bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.entries.push(OutputEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// Writes the field as LVF plus a CSV mirror when it is small.
    pub fn write_field(&mut self, stem: &str, f: &GridField<f64>) -> Result<(), CliError> {
        self.write(&format!("{stem}.lvf"), &encode_lvf(f))?;
        if f.grid().nodes() <= CSV_MIRROR_NODES {
            self.write(&format!("{stem}.csv"), &grid_csv(f))?;
        }
        Ok(())
    }

    pub fn entries(&self) -> &[OutputEntry] {
        &self.entries
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<RunManifest, CliError> {
        manifest.outputs = self.entries;
        manifest.finished_unix = unix_now();
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        let path = self.root.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(manifest)
    }
}

/// Re-reads every listed output and compares digests. Returns the paths
/// that are missing or changed.
pub fn verify_manifest(dir: &Path, manifest: &RunManifest) -> Vec<String> {
    manifest
        .outputs
        .iter()
        .filter(|e| fs::read(dir.join(&e.path)).map(|b| sha256_hex(&b) != e.sha256).unwrap_or(true))
        .map(|e| e.path.clone())
        .collect()
}

/// Digest over the listed outputs only, so wall-clock fields do not enter.
pub fn outputs_digest(manifest: &RunManifest) -> String {
    let mut h = Sha256::new();
    for e in &manifest.outputs {
        h.update(e.path.as_bytes());
        h.update([0]);
        h.update(e.sha256.as_bytes());
        h.update([0]);
    }
    hex::encode(h.finalize())
}
