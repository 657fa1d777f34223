//! Periodic collocation grid on [-q*pi, q*pi).

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Uniform periodic grid with `n` nodes on a torus of length `2*pi*q`.
///
/// Fourier indices k run over [-n/2, n/2); the physical wavenumber of
/// index k is k/q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    q: f64,
    n: usize,
}

impl Grid {
    pub fn new(q: f64, n: usize) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidGrid(format!("period factor q = {q} must be positive")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("node count n = {n} must be a power of two >= 8")));
        }
        Ok(Grid { q, n })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Node spacing h = 2*pi*q/n.
    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * PI * self.q / self.n as f64
    }

    /// Domain length 2*pi*q.
    #[inline]
    pub fn length(&self) -> f64 {
        2.0 * PI * self.q
    }

    /// j-th node, alpha_j = -q*pi + j*h.
    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        -self.q * PI + self.spacing() * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Signed Fourier index of FFT bin m, in [-n/2, n/2).
    #[inline]
    pub fn freq(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    /// FFT bin of a signed Fourier index.
    #[inline]
    pub fn bin(&self, k: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(k >= -n / 2 && k < n / 2);
        k.rem_euclid(n) as usize
    }

    /// Physical wavenumber of Fourier index k.
    #[inline]
    pub fn wavenumber(&self, k: i64) -> f64 {
        k as f64 / self.q
    }

    /// Largest Fourier index kept by the 2/3 dealiasing rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }
}
