//! Periodic Fourier discretisation of the line.
//!
//! Coefficients use the continuum convention: `c_k ≈ ∫ f(x) e^{-i ξ_k x} dx`
//! over the box `[-L/2, L/2)`, so `‖f‖²_{L²} = (1/2π) Σ |c_k|² Δξ = (1/L) Σ |c_k|²`.
//! Coefficients are stored in FFT order: index `j ≤ n/2` holds wavenumber `j`,
//! index `j > n/2` holds `j - n`. Index `n/2` is the (real) Nyquist mode.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative conjugate-symmetry defect above which a field is rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Relative slack used when comparing a frequency against a cutoff, so that
/// a cutoff equal to a grid frequency keeps that frequency.
const TIE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct RealGrid {
    box_length: f64,
    mode_count: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    box_length: f64,
    mode_count: usize,
}

impl TryFrom<RawGrid> for RealGrid {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        RealGrid::new(raw.box_length, raw.mode_count)
    }
}

impl RealGrid {
    pub fn new(box_length: f64, mode_count: usize) -> Result<Self> {
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::Parameter(format!(
                "box_length must be positive and finite, got {box_length}"
            )));
        }
        if mode_count < 2 || mode_count % 2 != 0 {
            return Err(Error::Parameter(format!(
                "mode_count must be an even integer >= 2, got {mode_count}"
            )));
        }
        Ok(Self {
            box_length,
            mode_count,
        })
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.mode_count as f64
    }

    /// Δξ = 2π/L.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn nyquist_index(&self) -> usize {
        self.mode_count / 2
    }

    /// Integer wavenumber stored at FFT index `idx`.
    pub fn wavenumber(&self, idx: usize) -> i64 {
        let n = self.mode_count;
        debug_assert!(idx < n);
        if idx <= n / 2 {
            idx as i64
        } else {
            idx as i64 - n as i64
        }
    }

    /// FFT index holding wavenumber `k`, if it is on the grid.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.mode_count / 2) as i64;
        if k > half || k <= -half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.mode_count as i64) as usize)
        }
    }

    pub fn frequency(&self, idx: usize) -> f64 {
        self.wavenumber(idx) as f64 * self.frequency_step()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.mode_count).map(|i| self.frequency(i)).collect()
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequency(self.nyquist_index())
    }

    /// Sample points `x_j = -L/2 + j Δx`.
    pub fn points(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.mode_count)
            .map(|j| -0.5 * self.box_length + j as f64 * dx)
            .collect()
    }

    /// Largest `|k|` with `|ξ_k| ≤ cutoff` (ties kept), saturated at `n/2`.
    pub fn low_band_limit(&self, cutoff: f64) -> usize {
        let half = self.mode_count / 2;
        if cutoff.is_nan() || cutoff < 0.0 {
            return 0;
        }
        if cutoff.is_infinite() {
            return half;
        }
        let ratio = cutoff / self.frequency_step();
        let kmax = (ratio * (1.0 + TIE_SLACK)).floor();
        if kmax >= half as f64 {
            half
        } else {
            kmax as usize
        }
    }

    /// Whether FFT index `idx` lies in `{|ξ| ≤ cutoff}`.
    pub fn in_low_band(&self, idx: usize, cutoff: f64) -> bool {
        self.wavenumber(idx).unsigned_abs() as usize <= self.low_band_limit(cutoff)
    }

    /// Retained wavenumbers `|k| ≤ K` where `K` is the largest integer strictly
    /// below `fraction · n/2`.
    pub fn dealias_limit(&self, fraction: f64) -> usize {
        let edge = fraction * (self.mode_count / 2) as f64;
        let k = edge.ceil() as i64 - 1;
        k.max(0) as usize
    }
}

impl fmt::Display for RealGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L = {}, n = {}", self.box_length, self.mode_count)
    }
}

#[inline]
fn alternating(idx: usize) -> f64 {
    if idx % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Fourier coefficients of a real field on a [`RealGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: RealGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: RealGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.mode_count()],
        }
    }

    /// Wraps raw coefficients after checking length and conjugate symmetry.
    pub fn from_coeffs(grid: RealGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.mode_count() {
            return Err(Error::InputShape {
                expected: grid.mode_count(),
                got: coeffs.len(),
            });
        }
        let field = Self { grid, coeffs };
        field.check_symmetry()?;
        Ok(field)
    }

    /// No symmetry check. Callers guarantee the coefficients come from a real field.
    pub(crate) fn from_coeffs_unchecked(grid: RealGrid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.mode_count());
        Self { grid, coeffs }
    }

    /// Builds a field from a continuum transform `f̂(ξ)` sampled at the grid
    /// frequencies. The result is symmetrised so it represents a real field;
    /// the Nyquist coefficient keeps only its real part.
    pub fn from_spectrum(grid: RealGrid, fhat: impl Fn(f64) -> Complex64) -> Self {
        let n = grid.mode_count();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        coeffs[0] = Complex64::new(fhat(0.0).re, 0.0);
        for k in 1..n / 2 {
            let c = fhat(grid.frequency(k));
            coeffs[k] = c;
            coeffs[n - k] = c.conj();
        }
        coeffs[n / 2] = Complex64::new(fhat(grid.max_frequency()).re, 0.0);
        Self { grid, coeffs }
    }

    /// Samples `f` on the grid and transforms it.
    pub fn from_fn(grid: RealGrid, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.points().into_iter().map(f).collect();
        let mut tr = Transformer::new(grid);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.mode_count()];
        tr.forward_into(&samples, &mut coeffs);
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at ξ = 0 (the integral of the field over the box).
    pub fn mean_coefficient(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Max of `|c_{-k} - conj(c_k)|`, `|Im c_0|`, `|Im c_{n/2}|`, relative to
    /// the largest coefficient modulus. Zero for the zero field.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.coeffs.len();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut defect = self.coeffs[0].im.abs().max(self.coeffs[n / 2].im.abs());
        for k in 1..n / 2 {
            defect = defect.max((self.coeffs[n - k] - self.coeffs[k].conj()).norm());
        }
        defect / scale
    }

    pub fn check_symmetry(&self) -> Result<()> {
        let defect = self.symmetry_defect();
        if defect > SYMMETRY_TOLERANCE {
            return Err(Error::InvalidField(format!(
                "conjugate symmetry broken (relative defect {defect:.3e} > {SYMMETRY_TOLERANCE:e})"
            )));
        }
        Ok(())
    }

    fn same_grid(&self, other: &Self) {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_grid(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Self::from_coeffs_unchecked(self.grid, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_grid(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_coeffs_unchecked(self.grid, coeffs)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * factor).collect();
        Self::from_coeffs_unchecked(self.grid, coeffs)
    }

    /// Keeps `{|ξ| ≤ cutoff}`. Ties stay in the low band.
    pub fn project_low(&self, cutoff: f64) -> Self {
        let kmax = self.grid.low_band_limit(cutoff);
        self.mask(|k| k <= kmax)
    }

    /// Keeps `{|ξ| > cutoff}`; the exact complement of [`Self::project_low`].
    pub fn project_high(&self, cutoff: f64) -> Self {
        let kmax = self.grid.low_band_limit(cutoff);
        self.mask(|k| k > kmax)
    }

    fn mask(&self, keep: impl Fn(usize) -> bool) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if keep(self.grid.wavenumber(i).unsigned_abs() as usize) {
                    c
                } else {
                    zero
                }
            })
            .collect();
        Self::from_coeffs_unchecked(self.grid, coeffs)
    }

    /// `(1/2π Σ (1+ξ²)^s |c_k|² Δξ)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = c.norm_sqr();
            if m == 0.0 {
                continue;
            }
            if s == 0.0 {
                acc += m;
            } else {
                let xi = self.grid.frequency(i);
                acc += (1.0 + xi * xi).powf(s) * m;
            }
        }
        (acc / self.grid.box_length()).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `f(· + y)`: multiplies the coefficient at ξ by `e^{iξy}`. The Nyquist
    /// coefficient is multiplied by `cos(ξ_N y)` to keep the field real.
    pub fn translate(&self, y: f64) -> Self {
        let nyq = self.grid.nyquist_index();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let xi = self.grid.frequency(i);
                if i == nyq {
                    c * (xi * y).cos()
                } else {
                    c * Complex64::from_polar(1.0, xi * y)
                }
            })
            .collect();
        Self::from_coeffs_unchecked(self.grid, coeffs)
    }

    /// `max_{0<y≤ε} ‖f(·+y) - f‖_{H^s}` over `samples` equally spaced shifts.
    /// The field is real, so negative shifts give the same values.
    pub fn translation_modulus(&self, s: f64, eps: f64, samples: usize) -> f64 {
        (1..=samples.max(1))
            .map(|j| {
                let y = eps * j as f64 / samples.max(1) as f64;
                self.translate(y).sub(self).sobolev_norm(s)
            })
            .fold(0.0, f64::max)
    }

    /// Fraction of the L² energy carried by wavenumbers above `kmax`.
    pub fn energy_fraction_above(&self, kmax: usize) -> f64 {
        let mut total = 0.0;
        let mut above = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = c.norm_sqr();
            total += m;
            if self.grid.wavenumber(i).unsigned_abs() as usize > kmax {
                above += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            above / total
        }
    }
}

/// Owns FFT plans and scratch space for one grid.
pub struct Transformer {
    grid: RealGrid,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Clone for Transformer {
    fn clone(&self) -> Self {
        Self {
            grid: self.grid,
            fft: Arc::clone(&self.fft),
            ifft: Arc::clone(&self.ifft),
            buf: self.buf.clone(),
            scratch: self.scratch.clone(),
        }
    }
}

impl fmt::Debug for Transformer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transformer").field("grid", &self.grid).finish()
    }
}

impl Transformer {
    pub fn new(grid: RealGrid) -> Self {
        let n = grid.mode_count();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        Self {
            grid,
            fft,
            ifft,
            buf: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn grid(&self) -> &RealGrid {
        &self.grid
    }

    pub fn forward(&mut self, samples: &[f64]) -> Result<SpectralField> {
        let n = self.grid.mode_count();
        if samples.len() != n {
            return Err(Error::InputShape {
                expected: n,
                got: samples.len(),
            });
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        self.forward_into(samples, &mut coeffs);
        Ok(SpectralField::from_coeffs_unchecked(self.grid, coeffs))
    }

    pub fn inverse(&mut self, field: &SpectralField) -> Result<Vec<f64>> {
        if field.grid() != &self.grid {
            return Err(Error::InputShape {
                expected: self.grid.mode_count(),
                got: field.grid().mode_count(),
            });
        }
        field.check_symmetry()?;
        let mut out = vec![0.0; self.grid.mode_count()];
        self.inverse_into(field.coeffs(), &mut out);
        Ok(out)
    }

    /// Unchecked forward transform; panics on length mismatch.
    pub fn forward_into(&mut self, samples: &[f64], out: &mut [Complex64]) {
        let n = self.grid.mode_count();
        assert_eq!(samples.len(), n);
        assert_eq!(out.len(), n);
        for (b, &s) in self.buf.iter_mut().zip(samples) {
            *b = Complex64::new(s, 0.0);
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        let dx = self.grid.spacing();
        for (i, (o, b)) in out.iter_mut().zip(&self.buf).enumerate() {
            *o = b * (dx * alternating(i));
        }
    }

    /// Unchecked inverse transform keeping the real part; panics on length mismatch.
    pub fn inverse_into(&mut self, coeffs: &[Complex64], out: &mut [f64]) {
        let n = self.grid.mode_count();
        assert_eq!(coeffs.len(), n);
        assert_eq!(out.len(), n);
        for (i, (b, c)) in self.buf.iter_mut().zip(coeffs).enumerate() {
            *b = c * alternating(i);
        }
        self.ifft.process_with_scratch(&mut self.buf, &mut self.scratch);
        let inv_l = 1.0 / self.grid.box_length();
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re * inv_l;
        }
    }
}

pub fn forward_transform(grid: RealGrid, samples: &[f64]) -> Result<SpectralField> {
    Transformer::new(grid).forward(samples)
}

pub fn inverse_transform(field: &SpectralField) -> Result<Vec<f64>> {
    Transformer::new(*field.grid()).inverse(field)
}

/// Share of energy near the edges of the periodic box, in space and in frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMass {
    /// Fraction of `Σ f_j²` on the outer 10% of the box at each end.
    pub spatial: f64,
    /// Fraction of `Σ |c_k|²` in the top 10% of the representable wavenumbers.
    pub spectral: f64,
}

impl BoundaryMass {
    pub const THRESHOLD: f64 = 1e-10;

    pub fn measure(field: &SpectralField) -> Self {
        let grid = *field.grid();
        let mut samples = vec![0.0; grid.mode_count()];
        Transformer::new(grid).inverse_into(field.coeffs(), &mut samples);
        let edge = 0.4 * grid.box_length();
        let (mut total, mut outer) = (0.0, 0.0);
        for (x, f) in grid.points().into_iter().zip(&samples) {
            total += f * f;
            if x.abs() >= edge {
                outer += f * f;
            }
        }
        let spatial = if total == 0.0 { 0.0 } else { outer / total };
        let kedge = (0.9 * grid.nyquist_index() as f64).floor() as usize;
        Self {
            spatial,
            spectral: field.energy_fraction_above(kedge),
        }
    }

    pub fn is_negligible(&self) -> bool {
        self.spatial < Self::THRESHOLD && self.spectral < Self::THRESHOLD
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: f64, n: usize) -> RealGrid {
        RealGrid::new(l, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(RealGrid::new(0.0, 8).is_err());
        assert!(RealGrid::new(1.0, 7).is_err());
        assert!(RealGrid::new(f64::INFINITY, 8).is_err());
        let g = grid(10.0, 8);
        assert_eq!(g.spacing(), 1.25);
        assert_eq!(
            (0..8).map(|i| g.wavenumber(i)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4, -3, -2, -1]
        );
        for k in -3..=4 {
            assert_eq!(g.wavenumber(g.index_of(k).unwrap()), k);
        }
        assert_eq!(g.index_of(-4), None);
    }

    #[test]
    fn constant_field_coefficient_is_box_length() {
        let g = grid(7.0, 16);
        let f = forward_transform(g, &[1.0; 16]).unwrap();
        assert!((f.coeffs()[0].re - 7.0).abs() < 1e-13);
        for c in &f.coeffs()[1..] {
            assert!(c.norm() < 1e-13);
        }
    }

    #[test]
    fn cosine_mode() {
        let l = 5.0;
        let g = grid(l, 32);
        let samples: Vec<f64> = g.points().iter().map(|x| (2.0 * PI * x / l).cos()).collect();
        let f = forward_transform(g, &samples).unwrap();
        assert!((f.coeffs()[1] - Complex64::new(l / 2.0, 0.0)).norm() < 1e-13);
        assert!((f.coeffs()[31] - Complex64::new(l / 2.0, 0.0)).norm() < 1e-13);
        let back = inverse_transform(&f).unwrap();
        for (a, b) in back.iter().zip(&samples) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn length_mismatch_is_shape_error() {
        let g = grid(1.0, 8);
        assert!(matches!(
            forward_transform(g, &[0.0; 7]),
            Err(Error::InputShape { expected: 8, got: 7 })
        ));
    }

    #[test]
    fn asymmetric_field_rejected() {
        let g = grid(1.0, 8);
        let mut c = vec![Complex64::new(0.0, 0.0); 8];
        c[1] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            SpectralField::from_coeffs(g, c),
            Err(Error::InvalidField(_))
        ));
    }

    #[test]
    fn zero_field_inverse_is_zero() {
        let g = grid(3.0, 8);
        let out = inverse_transform(&SpectralField::zeros(g)).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cosine_norm_on_two_pi_box() {
        let g = grid(2.0 * PI, 16);
        let f = SpectralField::from_fn(g, f64::cos);
        assert!((f.sobolev_norm(0.0) - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn projector_ties_and_extremes() {
        let g = grid(2.0 * PI, 16);
        let f = SpectralField::from_fn(g, |x| (x.cos() + (3.0 * x).sin()).exp());
        assert_eq!(f.project_low(g.max_frequency()), f);
        assert_eq!(f.project_low(1e300), f);
        assert!(f.project_high(g.max_frequency()).l2_norm() == 0.0);
        let mean = f.project_low(1e-9);
        assert_eq!(mean.coeffs()[0], f.coeffs()[0]);
        assert!(mean.coeffs()[1..].iter().all(|c| c.norm() == 0.0));
        // cutoff equal to ξ = 3 keeps wavenumber 3
        let low = f.project_low(3.0);
        assert_eq!(low.coeffs()[3], f.coeffs()[3]);
        assert_eq!(low.coeffs()[4], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dealias_limit_is_strictly_below_fraction() {
        let g = grid(1.0, 12);
        // 2/3 * 6 = 4 exactly, so K = 3
        assert_eq!(g.dealias_limit(2.0 / 3.0), 3);
        assert_eq!(g.dealias_limit(1.0), 5);
        assert_eq!(grid(1.0, 1024).dealias_limit(2.0 / 3.0), 341);
    }

    #[test]
    fn translate_periodic_and_identity() {
        let g = grid(10.0, 64);
        let f = SpectralField::from_fn(g, |x| (-x * x).exp());
        assert_eq!(f.translate(0.0), f);
        let t = f.translate(10.0);
        let rel = t.sub(&f).l2_norm() / f.l2_norm();
        assert!(rel < 1e-12, "{rel}");
        let moved = f.translate(1.3);
        assert!((moved.l2_norm() - f.l2_norm()).abs() < 1e-14 * f.l2_norm());
    }

    #[test]
    fn translate_matches_physical_shift() {
        let l = 8.0;
        let g = grid(l, 32);
        let m = 3.0;
        let xi = 2.0 * PI * m / l;
        let y = 0.37;
        let f = SpectralField::from_fn(g, |x| (xi * x).cos());
        let shifted = SpectralField::from_fn(g, |x| (xi * (x + y)).cos());
        for s in [0.0, 1.0, 2.5] {
            let a = f.translate(y).sub(&f).sobolev_norm(s);
            let b = shifted.sub(&f).sobolev_norm(s);
            assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn gaussian_matches_analytic_transform() {
        // L = 50 standard deviations of exp(-x²/2)
        let g = grid(50.0, 256);
        let f = SpectralField::from_fn(g, |x| (-0.5 * x * x).exp());
        for (i, c) in f.coeffs().iter().enumerate() {
            let xi = g.frequency(i);
            let exact = (2.0 * PI).sqrt() * (-0.5 * xi * xi).exp();
            assert!((c - Complex64::new(exact, 0.0)).norm() < 1e-8, "{i}");
        }
    }

    #[test]
    fn plancherel_against_physical_quadrature() {
        let g = grid(30.0, 512);
        let f = SpectralField::from_fn(g, |x| (-x * x).exp() * (1.0 + x.sin()));
        let samples = inverse_transform(&f).unwrap();
        let phys = (samples.iter().map(|v| v * v).sum::<f64>() * g.spacing()).sqrt();
        assert!((phys - f.l2_norm()).abs() < 1e-10 * phys);
    }

    #[test]
    fn boundary_mass_of_localised_gaussian() {
        let g = grid(40.0 * PI, 1024);
        let f = SpectralField::from_fn(g, |x| (-x * x).exp());
        let b = BoundaryMass::measure(&f);
        assert!(b.is_negligible(), "{b:?}");
        let wide = SpectralField::from_fn(g, |x| (-(x / 40.0).powi(2)).exp());
        assert!(!BoundaryMass::measure(&wide).is_negligible());
    }
}
