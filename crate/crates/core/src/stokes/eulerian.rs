//! Conversion from the interface parametrization to Eulerian elevation.

use crate::error::{Error, Result};
use crate::waterwave::WaterState;

/// Elevation samples on a uniform horizontal grid over one period.
#[derive(Debug, Clone)]
pub struct EulerianElevation {
    pub xs: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Invert x(alpha) = Re zeta by monotone cubic interpolation of the periodic
/// correction alpha(x) - x, then evaluate Im zeta spectrally.
pub fn elevation(state: &WaterState, n_out: usize) -> Result<EulerianElevation> {
    let grid = state.grid();
    let n = grid.n();
    let offset = state.offset();
    let dre = offset.derivative();
    let min_slope = 1.0
        + dre
            .samples()
            .iter()
            .map(|c| c.re)
            .fold(f64::INFINITY, f64::min);
    if min_slope <= 0.0 {
        return Err(Error::NonMonotoneParametrization(min_slope));
    }

    // data: g(x_j) = alpha_j - x_j = -Re offset_j on the increasing nodes x_j
    let length = grid.length();
    let xs_data: Vec<f64> = (0..n).map(|j| grid.node(j) + offset.samples()[j].re).collect();
    let gs: Vec<f64> = (0..n).map(|j| -offset.samples()[j].re).collect();

    // periodic extension helpers
    let x_at = |j: i64| -> f64 {
        let wrap = j.div_euclid(n as i64);
        xs_data[j.rem_euclid(n as i64) as usize] + wrap as f64 * length
    };
    let g_at = |j: i64| -> f64 { gs[j.rem_euclid(n as i64) as usize] };

    // Fritsch-Carlson tangents on the nonuniform periodic data
    let slope = |j: i64| (g_at(j + 1) - g_at(j)) / (x_at(j + 1) - x_at(j));
    let tangent: Vec<f64> = (0..n as i64)
        .map(|j| {
            let sm = slope(j - 1);
            let sp = slope(j);
            if sm * sp <= 0.0 {
                0.0
            } else {
                let hm = x_at(j) - x_at(j - 1);
                let hp = x_at(j + 1) - x_at(j);
                let w1 = 2.0 * hp + hm;
                let w2 = hp + 2.0 * hm;
                (w1 + w2) / (w1 / sm + w2 / sp)
            }
        })
        .collect();
    let t_at = |j: i64| tangent[j.rem_euclid(n as i64) as usize];

    let interp = |x: f64| -> f64 {
        // normalize into the fundamental span of the data
        let x0 = xs_data[0];
        let wrap = ((x - x0) / length).floor();
        let xm = x - wrap * length;
        // locate the interval by binary search
        let mut lo = 0i64;
        let mut hi = n as i64;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x_at(mid) <= xm {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = x_at(lo + 1) - x_at(lo);
        let s = (xm - x_at(lo)) / h;
        let (g0, g1) = (g_at(lo), g_at(lo + 1));
        let (d0, d1) = (t_at(lo) * h, t_at(lo + 1) * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * g0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * g1
            + (s3 - s2) * d1
    };

    let mut xs = Vec::with_capacity(n_out);
    let mut eta = Vec::with_capacity(n_out);
    let q = grid.q();
    for i in 0..n_out {
        let x = -q * std::f64::consts::PI + length * i as f64 / n_out as f64;
        let alpha = x + interp(x);
        xs.push(x);
        eta.push(offset.eval_at(alpha).im);
    }
    Ok(EulerianElevation { xs, eta })
}

/// Cosine amplitude of each requested profile harmonic of the elevation,
/// together with the mean level. Mode k refers to cos(k x).
pub fn harmonic_amplitudes(elev: &EulerianElevation, modes: &[i64]) -> (f64, Vec<f64>) {
    let n = elev.eta.len();
    let mean = elev.eta.iter().sum::<f64>() / n as f64;
    let amps = modes
        .iter()
        .map(|&k| {
            let mut acc = num_complex::Complex64::default();
            for (i, &e) in elev.eta.iter().enumerate() {
                let x = elev.xs[i];
                acc += e * num_complex::Complex64::from_polar(1.0, -(k as f64) * x);
            }
            2.0 * acc.norm() / n as f64
        })
        .collect();
    (mean, amps)
}
