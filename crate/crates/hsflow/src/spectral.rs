//! Periodic calculus on S¹ = ℝ/2πℤ for uniformly gridded fields.
//!
//! All fields live on the grid x_k = 2πk/N (N even). Derivatives are
//! computed in Fourier space (multiply mode k by (ik)^order), integrals by
//! the rectangle rule, which is spectrally accurate on a periodic grid.
//! Two consequences are load-bearing for the rest of the crate:
//!
//! * `integrate(derivative(f, 1)) == 0` to roundoff for every field, since
//!   differentiation annihilates the mean mode. This is what turns the
//!   conservation law ∫∂ₜAᵢ = 0 into a machine-precision identity.
//! * Trigonometric interpolation (`resample`) and the continuous
//!   antiderivative ([`Antiderivative`]) evaluate the same band-limited
//!   interpolant off-grid, which the gauge map inversion relies on.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

/// Smallest admissible grid.
pub const MIN_GRID: usize = 8;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid size {0} invalid: need an even N >= {MIN_GRID}")]
    BadGridSize(usize),
    #[error("non-finite sample {value} at grid point {index}")]
    NonFinite { index: usize, value: f64 },
}

/// A real scalar field sampled at x_k = 2πk/N, k = 0..N-1.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    values: Vec<f64>,
}

/// Grid points x_k = 2πk/N.
pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

fn check_grid_size(n: usize) -> Result<(), FieldError> {
    if n < MIN_GRID || !n.is_multiple_of(2) {
        return Err(FieldError::BadGridSize(n));
    }
    Ok(())
}

impl PeriodicField {
    pub fn new(values: Vec<f64>) -> Result<Self, FieldError> {
        check_grid_size(values.len())?;
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(FieldError::NonFinite { index, value });
            }
        }
        Ok(Self { values })
    }

    /// Sample a closure on the uniform grid.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self, FieldError> {
        check_grid_size(n)?;
        Self::new(grid(n).into_iter().map(f).collect())
    }

    pub fn constant(n: usize, c: f64) -> Result<Self, FieldError> {
        Self::new(vec![c; n])
    }

    /// Construct without the finiteness scan; grid size must already be valid.
    /// Used for derived fields whose inputs were validated.
    pub(crate) fn from_values_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= MIN_GRID && values.len().is_multiple_of(2));
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn all_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> PeriodicField {
        Self::from_values_unchecked(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &PeriodicField, f: impl Fn(f64, f64) -> f64) -> PeriodicField {
        assert_eq!(self.len(), other.len(), "grid size mismatch");
        Self::from_values_unchecked(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Spectral derivative of the given order. The Nyquist mode is zeroed
    /// for odd orders (it carries no sign information on the grid).
    /// Non-finite output signals overflow in the input.
    pub fn derivative(&self, order: u32) -> PeriodicField {
        assert!(order >= 1, "derivative order must be positive");
        let n = self.len();
        let mut spec = forward(&self.values);
        for (idx, c) in spec.iter_mut().enumerate() {
            let k = signed_wavenumber(idx, n);
            if idx == n / 2 && order % 2 == 1 {
                *c = Complex::new(0.0, 0.0);
            } else {
                *c *= Complex::new(0.0, k).powu(order);
            }
        }
        Self::from_values_unchecked(inverse_real(spec))
    }

    /// First and second derivatives from a single forward transform.
    /// Identical results to `derivative(1)` and `derivative(2)`.
    pub fn derivatives_12(&self) -> (PeriodicField, PeriodicField) {
        let n = self.len();
        let spec = forward(&self.values);
        let mut d1 = spec.clone();
        let mut d2 = spec;
        for idx in 0..n {
            let k = signed_wavenumber(idx, n);
            if idx == n / 2 {
                d1[idx] = Complex::new(0.0, 0.0);
            } else {
                d1[idx] *= Complex::new(0.0, k);
            }
            d2[idx] *= Complex::new(0.0, k).powu(2);
        }
        (
            Self::from_values_unchecked(inverse_real(d1)),
            Self::from_values_unchecked(inverse_real(d2)),
        )
    }

    /// ∫_{S¹} f dx₀ by the rectangle rule (spectrally accurate here).
    pub fn integrate(&self) -> f64 {
        let n = self.len() as f64;
        TAU / n * self.values.iter().sum::<f64>()
    }

    /// F(x_k) = ∫₀^{x_k} f for k = 0..N, so the result has length N+1 and
    /// F(x_N) = F(2π) equals `integrate` exactly.
    pub fn cumulative_integral(&self) -> Vec<f64> {
        let n = self.len();
        let total = self.integrate();
        let mut spec = forward(&self.values);
        // Antiderivative of the mean-free part: divide mode k by ik. The
        // Nyquist antiderivative sin(Nx/2) vanishes at every grid point.
        spec[0] = Complex::new(0.0, 0.0);
        spec[n / 2] = Complex::new(0.0, 0.0);
        for (idx, c) in spec.iter_mut().enumerate() {
            let k = signed_wavenumber(idx, n);
            if k != 0.0 {
                *c /= Complex::new(0.0, k);
            }
        }
        let fluct = inverse_real(spec);
        let g0 = fluct[0];
        (0..=n)
            .map(|k| total * (k as f64 / n as f64) + (fluct[k % n] - g0))
            .collect()
    }

    /// Trigonometric interpolation at arbitrary points in [0, 2π).
    pub fn resample(&self, points: &[f64]) -> Vec<f64> {
        let interp = TrigInterpolant::new(self);
        points.iter().map(|&x| interp.eval(x)).collect()
    }
}

fn signed_wavenumber(idx: usize, n: usize) -> f64 {
    if idx <= n / 2 {
        idx as f64
    } else {
        idx as f64 - n as f64
    }
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let mut planner = PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .expect("FFT planner lock poisoned");
    if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    }
}

/// Unnormalized forward DFT of real samples.
fn forward(values: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    plan(values.len(), true).process(&mut buf);
    buf
}

/// Inverse DFT, normalized, real part.
fn inverse_real(mut spec: Vec<Complex<f64>>) -> Vec<f64> {
    let n = spec.len();
    plan(n, false).process(&mut spec);
    let norm = 1.0 / n as f64;
    spec.iter().map(|c| c.re * norm).collect()
}

/// The band-limited interpolant of a field, evaluable off-grid:
///
///   f(x) = (1/N)·[c₀ + 2·Re Σ_{k=1}^{N/2-1} c_k e^{ikx} + c_{N/2}·cos(Nx/2)]
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    n: usize,
    coeffs: Vec<Complex<f64>>,
}

impl TrigInterpolant {
    pub fn new(f: &PeriodicField) -> Self {
        Self {
            n: f.len(),
            coeffs: forward(f.values()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n;
        let half = n / 2;
        let z = Complex::from_polar(1.0, x);
        // Horner over modes 1..N/2-1.
        let mut sum = Complex::new(0.0, 0.0);
        for k in (1..half).rev() {
            sum = (sum + self.coeffs[k]) * z;
        }
        let nyquist = self.coeffs[half].re * (half as f64 * x).cos();
        (self.coeffs[0].re + 2.0 * sum.re + nyquist) / n as f64
    }
}

/// Continuous antiderivative F(x) = ∫₀ˣ f of the interpolant of f,
/// evaluable at arbitrary x. On grid points it agrees with
/// [`PeriodicField::cumulative_integral`].
#[derive(Debug, Clone)]
pub struct Antiderivative {
    n: usize,
    total: f64,
    /// c_k/(ik) for k = 1..N/2-1 (index 0 unused).
    coeffs: Vec<Complex<f64>>,
    nyquist: f64,
    g0: f64,
}

impl Antiderivative {
    pub fn new(f: &PeriodicField) -> Self {
        let n = f.len();
        let half = n / 2;
        let spec = forward(f.values());
        let mut coeffs = vec![Complex::new(0.0, 0.0); half];
        let mut g0 = 0.0;
        for (k, slot) in coeffs.iter_mut().enumerate().skip(1) {
            *slot = spec[k] / Complex::new(0.0, k as f64);
            g0 += 2.0 * slot.re;
        }
        Self {
            n,
            total: f.integrate(),
            coeffs,
            nyquist: spec[half].re,
            g0: g0 / n as f64,
        }
    }

    /// Total integral over one period, F(2π).
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n;
        let half = n / 2;
        let z = Complex::from_polar(1.0, x);
        let mut sum = Complex::new(0.0, 0.0);
        for k in (1..half).rev() {
            sum = (sum + self.coeffs[k]) * z;
        }
        let nyquist = self.nyquist * (half as f64 * x).sin() / half as f64;
        self.total * (x / TAU) + (2.0 * sum.re + nyquist) / n as f64 - self.g0
    }
}
