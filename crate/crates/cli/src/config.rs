//! Flat key=value experiment configuration with flag overrides.

use anyhow::{bail, Context, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub eps: f64,
    /// Fast period factor (positive integer).
    pub q: f64,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub delta: f64,
    pub mu: f64,
    pub s: f64,
    pub s_prime: f64,
    /// Guard-mode amplitude of the seed (before normalization).
    pub seed_eta: f64,
    pub n_slow: usize,
    pub n_modes: i64,
    pub newton_tol: f64,
    pub gamma_max: f64,
    pub family_points: usize,
    pub snapshot_stride: usize,
    pub nls_dt: f64,
    pub out_dir: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        // desk-scale preset
        ExperimentConfig {
            eps: 0.1,
            q: 10.0,
            n: 1024,
            dt: 0.02,
            t_end: 250.0,
            delta: 0.01,
            mu: 0.1,
            s: 4.0,
            s_prime: 11.0,
            seed_eta: 0.01 / 200.0,
            n_slow: 32,
            n_modes: 16,
            newton_tol: 1e-11,
            gamma_max: 0.15,
            family_points: 41,
            snapshot_stride: 100,
            nls_dt: 1e-3,
            out_dir: "runs/default".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_sources(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut map = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            parse_kv(&text, &mut map)?;
        }
        for item in overrides {
            parse_kv(item, &mut map)?;
        }
        let mut cfg = ExperimentConfig::default();
        let mut eta_set = false;
        for (k, v) in &map {
            match k.as_str() {
                "eps" => cfg.eps = v.parse()?,
                "q" => cfg.q = v.parse()?,
                "n" => cfg.n = v.parse()?,
                "dt" => cfg.dt = v.parse()?,
                "t_end" => cfg.t_end = v.parse()?,
                "delta" => cfg.delta = v.parse()?,
                "mu" => cfg.mu = v.parse()?,
                "s" => cfg.s = v.parse()?,
                "s_prime" => cfg.s_prime = v.parse()?,
                "seed_eta" => {
                    cfg.seed_eta = v.parse()?;
                    eta_set = true;
                }
                "n_slow" => cfg.n_slow = v.parse()?,
                "n_modes" => cfg.n_modes = v.parse()?,
                "newton_tol" => cfg.newton_tol = v.parse()?,
                "gamma_max" => cfg.gamma_max = v.parse()?,
                "family_points" => cfg.family_points = v.parse()?,
                "snapshot_stride" => cfg.snapshot_stride = v.parse()?,
                "nls_dt" => cfg.nls_dt = v.parse()?,
                "out_dir" => cfg.out_dir = v.clone(),
                other => bail!("unknown config key '{other}'"),
            }
        }
        if !map.contains_key("s_prime") {
            cfg.s_prime = cfg.s + 7.0;
        }
        if !eta_set {
            cfg.seed_eta = cfg.delta / 200.0;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let qi = self.q.round();
        if (self.q - qi).abs() > 1e-9 || qi < 1.0 {
            bail!("q = {} must be a positive integer", self.q);
        }
        if self.q * self.eps < 1.0 - 1e-12 {
            bail!(
                "q * eps = {} must be at least 1 (long-wave setting)",
                self.q * self.eps
            );
        }
        if self.s < 4.0 {
            bail!("s = {} must be at least 4", self.s);
        }
        // explicit scheme stability against sqrt(k) dispersion
        let kmax = self.n as f64 / (3.0 * self.q);
        let cfl = 0.5 / kmax.sqrt();
        if self.dt > cfl {
            bail!("dt = {} exceeds the stability bound {:.4}", self.dt, cfl);
        }
        Ok(())
    }

    /// Slow-torus period factor.
    pub fn q1(&self) -> f64 {
        self.q * self.eps
    }

    /// Canonical key=value rendering (sorted, diff-friendly).
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        push("delta", format!("{}", self.delta));
        push("dt", format!("{}", self.dt));
        push("eps", format!("{}", self.eps));
        push("family_points", format!("{}", self.family_points));
        push("gamma_max", format!("{}", self.gamma_max));
        push("mu", format!("{}", self.mu));
        push("n", format!("{}", self.n));
        push("n_modes", format!("{}", self.n_modes));
        push("n_slow", format!("{}", self.n_slow));
        push("newton_tol", format!("{}", self.newton_tol));
        push("nls_dt", format!("{}", self.nls_dt));
        push("out_dir", self.out_dir.clone());
        push("q", format!("{}", self.q));
        push("s", format!("{}", self.s));
        push("s_prime", format!("{}", self.s_prime));
        push("seed_eta", format!("{}", self.seed_eta));
        push("snapshot_stride", format!("{}", self.snapshot_stride));
        push("t_end", format!("{}", self.t_end));
        out
    }
}

fn parse_kv(text: &str, map: &mut BTreeMap<String, String>) -> Result<()> {
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .with_context(|| format!("expected key=value, got '{line}'"))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(())
}
