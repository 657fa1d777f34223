//! Run-directory output: manifest, CSV series, checkpoints, SVG plots.

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use sideband_core::waterwave::WaterState;
use sideband_core::{Field, Grid};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Full-precision decimal rendering (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct RunDir {
    pub root: PathBuf,
}

impl RunDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        fs::create_dir_all(root.join("snapshots"))?;
        fs::create_dir_all(root.join("plots"))?;
        Ok(RunDir { root })
    }

    /// Manifest: canonical config text plus its content hash.
    pub fn write_manifest(&self, kv: &str, extra: &serde_json::Value) -> Result<()> {
        let mut hasher = Sha256::new();
        hasher.update(kv.as_bytes());
        let hash = hasher.finalize();
        let manifest = serde_json::json!({
            "format": "sideband-run v1",
            "config": kv,
            "content_hash": format!("{hash:x}"),
            "extra": extra,
        });
        fs::write(
            self.root.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        fs::write(self.root.join("config.txt"), kv)?;
        Ok(())
    }

    pub fn write_json(&self, name: &str, value: &serde_json::Value) -> Result<()> {
        fs::write(self.root.join(name), serde_json::to_string_pretty(value)?)?;
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }
}

/// Versioned-header CSV with 17-significant-digit values.
pub struct CsvWriter {
    file: fs::File,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let mut file = fs::File::create(path)
            .with_context(|| format!("creating {}", path.display()))?;
        writeln!(file, "# schema v1")?;
        writeln!(file, "{}", header.join(","))?;
        Ok(CsvWriter { file })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        let line: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(self.file, "{}", line.join(","))?;
        Ok(())
    }
}

/// Checkpoint: text header naming the grid plus interleaved little-endian
/// doubles for both state fields (re, im per sample).
pub fn write_checkpoint(path: &Path, state: &WaterState, eps: f64) -> Result<()> {
    let grid = state.grid();
    let mut file = fs::File::create(path)?;
    writeln!(file, "wwcheck v1")?;
    writeln!(
        file,
        "q={} n={} t={} eps={}",
        grid.q(),
        grid.n(),
        fmt_f64(state.t()),
        eps
    )?;
    writeln!(file)?;
    let mut bytes = Vec::with_capacity(grid.n() * 32);
    for field in [state.offset(), state.u()] {
        for v in field.samples() {
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    file.write_all(&bytes)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<(WaterState, f64)> {
    let data = fs::read(path)?;
    let header_end = data
        .windows(2)
        .position(|w| w == b"\n\n")
        .context("checkpoint missing blank line")?
        + 2;
    let header = std::str::from_utf8(&data[..header_end])?;
    let mut q = None;
    let mut n = None;
    let mut t = None;
    let mut eps = None;
    for token in header.split_whitespace() {
        if let Some((k, v)) = token.split_once('=') {
            match k {
                "q" => q = Some(v.parse::<f64>()?),
                "n" => n = Some(v.parse::<usize>()?),
                "t" => t = Some(v.parse::<f64>()?),
                "eps" => eps = Some(v.parse::<f64>()?),
                _ => {}
            }
        }
    }
    let (q, n, t, eps) = (
        q.context("q missing")?,
        n.context("n missing")?,
        t.context("t missing")?,
        eps.context("eps missing")?,
    );
    let grid = Grid::new(q, n)?;
    let payload = &data[header_end..];
    anyhow::ensure!(payload.len() == 32 * n, "checkpoint payload size mismatch");
    let mut read_field = |offset: usize| -> Field {
        let samples = (0..n)
            .map(|j| {
                let base = offset + 16 * j;
                let re = f64::from_le_bytes(payload[base..base + 8].try_into().unwrap());
                let im = f64::from_le_bytes(payload[base + 8..base + 16].try_into().unwrap());
                num_complex::Complex64::new(re, im)
            })
            .collect();
        Field::from_samples(grid, samples)
    };
    let offset = read_field(0);
    let u = read_field(16 * n);
    Ok((WaterState::new(grid, t, offset, u), eps))
}

/// Minimal static SVG line plot (optionally log-scaled ordinate).
pub fn write_svg_plot(
    path: &Path,
    title: &str,
    series: &[(&str, &[(f64, f64)])],
    logy: bool,
) -> Result<()> {
    const W: f64 = 720.0;
    const H: f64 = 440.0;
    const M: f64 = 60.0;
    let transform = |v: f64| if logy { v.max(1e-300).log10() } else { v };
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for (_, pts) in series {
        for &(x, y) in *pts {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            let ty = transform(y);
            ymin = ymin.min(ty);
            ymax = ymax.max(ty);
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax - xmin).abs() < 1e-300 {
        xmax = xmin + 1.0;
    }
    if (ymax - ymin).abs() < 1e-300 {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| M + (x - xmin) / (xmax - xmin) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (transform(y) - ymin) / (ymax - ymin) * (H - 2.0 * M);

    let mut svg = String::new();
    write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    )?;
    write!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>")?;
    write!(
        svg,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">{title}</text>",
        W / 2.0
    )?;
    write!(
        svg,
        "<line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        H - M,
        W - M,
        H - M
    )?;
    write!(
        svg,
        "<line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>",
        H - M
    )?;
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let mut d = String::new();
        for (j, &(x, y)) in pts.iter().enumerate() {
            write!(d, "{}{:.2},{:.2} ", if j == 0 { "M" } else { "L" }, sx(x), sy(y))?;
        }
        write!(svg, "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>")?;
        write!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{name}</text>",
            W - M + 4.0 - 160.0,
            M + 16.0 * i as f64
        )?;
    }
    write!(svg, "</svg>")?;
    fs::write(path, svg)?;
    Ok(())
}
