//! Complex periodic fields: samples plus cached Fourier coefficients.

use super::fft;
use super::grid::Grid;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// A complex-valued function on a periodic grid.
///
/// The spectrum uses the coefficient convention
/// `f_k = integral of f(x) exp(-i k x / q) dx` (trapezoid rule, which is
/// exact for band-limited integrands), with inversion
/// `f(x) = (1/2 pi q) * sum_k f_k exp(i k x / q)`.
#[derive(Debug)]
pub struct Field {
    grid: Grid,
    samples: Vec<Complex64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl Clone for Field {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Field {
            grid: self.grid,
            samples: self.samples.clone(),
            spectrum,
        }
    }
}

impl Field {
    pub fn from_samples(grid: Grid, samples: Vec<Complex64>) -> Self {
        assert_eq!(samples.len(), grid.n(), "sample count must match grid");
        Field {
            grid,
            samples,
            spectrum: OnceLock::new(),
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = (0..grid.n()).map(|j| f(grid.node(j))).collect();
        Field::from_samples(grid, samples)
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Field::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(grid: Grid) -> Self {
        Field::from_samples(grid, vec![Complex64::default(); grid.n()])
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        Field::from_samples(grid, vec![c; grid.n()])
    }

    /// Build a field from paper-convention coefficients, indexed by FFT bin.
    pub fn from_spectrum(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.n());
        let n = grid.n();
        let norm = 1.0 / (grid.spacing() * n as f64);
        let mut buf: Vec<Complex64> = (0..n)
            .map(|m| {
                let sign = if grid.freq(m) % 2 == 0 { 1.0 } else { -1.0 };
                coeffs[m] * sign
            })
            .collect();
        fft::inverse(&mut buf);
        for v in buf.iter_mut() {
            *v *= norm;
        }
        let field = Field::from_samples(grid, buf);
        let _ = field.spectrum.set(coeffs);
        field
    }

    /// Field with a single Fourier mode: c * exp(i k x / q).
    pub fn single_mode(grid: Grid, k: i64, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::default(); grid.n()];
        coeffs[grid.bin(k)] = c * grid.length();
        Field::from_spectrum(grid, coeffs)
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Paper-convention Fourier coefficients, indexed by FFT bin (lazy).
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let n = self.grid.n();
            let h = self.grid.spacing();
            let mut buf = self.samples.clone();
            fft::forward(&mut buf);
            for m in 0..n {
                let sign = if self.grid.freq(m) % 2 == 0 { 1.0 } else { -1.0 };
                buf[m] *= h * sign;
            }
            buf
        })
    }

    /// Coefficient of exp(i k x / q).
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.spectrum()[self.grid.bin(k)]
    }

    /// Mean value M(f) = f_0 / (2 pi q).
    pub fn mean(&self) -> Complex64 {
        let n = self.samples.len() as f64;
        self.samples.iter().sum::<Complex64>() / n
    }

    /// Apply a multiplier m(k) in Fourier space.
    pub fn fourier_multiplier(&self, m: impl Fn(i64) -> Complex64) -> Field {
        let grid = self.grid;
        let coeffs = self
            .spectrum()
            .iter()
            .enumerate()
            .map(|(i, &c)| c * m(grid.freq(i)))
            .collect();
        Field::from_spectrum(grid, coeffs)
    }

    /// d/dx via i*k/q multiplier.
    pub fn derivative(&self) -> Field {
        let q = self.grid.q();
        self.fourier_multiplier(|k| Complex64::new(0.0, k as f64 / q))
    }

    pub fn derivative_n(&self, order: u32) -> Field {
        let q = self.grid.q();
        self.fourier_multiplier(|k| Complex64::new(0.0, k as f64 / q).powu(order))
    }

    /// Sobolev norm ((1/2 pi q) sum (1+|k/q|)^{2s} |f_k|^2)^{1/2}.
    ///
    /// The 1/(2 pi q) factor makes the s = 0 case agree with the integral
    /// L^2 norm, so that a unit constant has norm sqrt(2 pi q).
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let q = self.grid.q();
        let sum: f64 = self
            .spectrum()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.grid.freq(i) as f64 / q;
                (1.0 + k.abs()).powf(2.0 * s) * c.norm_sqr()
            })
            .sum();
        (sum / self.grid.length()).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        (self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * h).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point.
    pub fn eval_at(&self, x: f64) -> Complex64 {
        let grid = self.grid;
        let norm = 1.0 / grid.length();
        let mut acc = Complex64::default();
        for (m, &c) in self.spectrum().iter().enumerate() {
            if c == Complex64::default() {
                continue;
            }
            let k = grid.freq(m) as f64;
            acc += c * Complex64::from_polar(1.0, k * x / grid.q());
        }
        acc * norm
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field::from_samples(self.grid, self.samples.iter().map(|&c| f(c)).collect())
    }

    pub fn zip(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Field {
        assert_eq!(self.grid, other.grid);
        Field::from_samples(
            self.grid,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|a| a * c)
    }

    pub fn conj(&self) -> Field {
        self.map(|a| a.conj())
    }

    pub fn real_part(&self) -> Field {
        self.map(|a| Complex64::new(a.re, 0.0))
    }

    pub fn imag_part(&self) -> Field {
        self.map(|a| Complex64::new(a.im, 0.0))
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Zero all modes with |k| above the 2/3-rule cutoff.
    pub fn dealias(&self) -> Field {
        let cutoff = self.grid.dealias_cutoff();
        self.fourier_multiplier(|k| {
            if k.abs() > cutoff {
                Complex64::default()
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
    }

    /// Zero spectral amplitudes below `threshold` times the peak amplitude.
    pub fn krasny_filter(&self, threshold: f64) -> Field {
        let peak = self.spectrum().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = peak * threshold;
        let coeffs = self
            .spectrum()
            .iter()
            .map(|&c| if c.norm() < cut { Complex64::default() } else { c })
            .collect();
        Field::from_spectrum(self.grid, coeffs)
    }

    /// Largest |k| carrying a nonzero coefficient.
    pub fn band_limit(&self) -> i64 {
        let mut kmax = 0;
        for (m, c) in self.spectrum().iter().enumerate() {
            if c.norm() > 0.0 {
                kmax = kmax.max(self.grid.freq(m).abs());
            }
        }
        kmax
    }

    /// Resample onto a grid with the same period but a different n.
    pub fn resample(&self, target: Grid) -> Field {
        assert!(
            (target.q() - self.grid.q()).abs() < 1e-14,
            "resample requires equal period factors"
        );
        let mut coeffs = vec![Complex64::default(); target.n()];
        for (m, &c) in self.spectrum().iter().enumerate() {
            let k = self.grid.freq(m);
            if k.abs() < (target.n() / 2) as i64 {
                coeffs[target.bin(k)] = c;
            }
        }
        Field::from_spectrum(target, coeffs)
    }

    /// f(x + shift) by phase rotation in Fourier space.
    pub fn translate(&self, shift: f64) -> Field {
        let q = self.grid.q();
        self.fourier_multiplier(|k| Complex64::from_polar(1.0, k as f64 * shift / q))
    }
}

/// Grid values of alpha as a complex field (the identity parametrization).
pub fn identity_field(grid: Grid) -> Field {
    Field::from_fn(grid, |x| Complex64::new(x, 0.0))
}

/// Useful constant: 2 pi.
pub const TWO_PI: f64 = 2.0 * PI;
