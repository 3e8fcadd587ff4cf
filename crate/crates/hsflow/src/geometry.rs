//! Simple-type hypersymplectic triples on T⁴ and their closed-form geometry.
//!
//! A triple of potentials φᵢ: S¹ → ℝ defines Aᵢ = 1 + φᵢ″, from which
//!
//!   V = (A₁A₂A₃)^{1/3},   fᵢ = Aᵢ/V,   g = V²dx₀² + Σ fᵢ dxᵢ²
//!
//! with the wedge-product Gram matrix Q = diag(f₁, f₂, f₃). The state keeps
//! only (f₁, f₂, V); f₃ = 1/(f₁f₂) is always derived, so det Q = 1 and
//! f₁f₂f₃ ≡ 1 are structural rather than numerical facts.
//!
//! Everything here is a pointwise formula in the fields and their x₀
//! derivatives: the torsion coefficients cᵢ = (log fᵢ)′ fᵢ/V, the scalar
//! torsion 𝒯 = V⁻² Σ ((log fᵢ)′)², the warped-product curvature tensors,
//! and the meridian/volume functionals. The identity R = −𝒯/2 ties two
//! independently computed quantities together and is used as a test.

use crate::spectral::{FieldError, PeriodicField};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("definiteness violated: A{index} = {value:.6e} <= 0 at grid point {point} (x0 = {x0:.6})")]
    Definiteness {
        index: usize,
        point: usize,
        x0: f64,
        value: f64,
    },
    #[error("potential {index}: mode k = 0 is not admissible (constants shift nothing)")]
    ZeroWavenumber { index: usize },
    #[error("potential {index}: mode k = {wavenumber} is not resolvable on an N = {grid} grid (need k < N/2)")]
    BandLimit {
        index: usize,
        wavenumber: u32,
        grid: usize,
    },
    #[error("{name} must be positive, found {value:.6e} at grid point {point}")]
    NonPositive {
        name: &'static str,
        point: usize,
        value: f64,
    },
    #[error("triple fields must share one grid")]
    GridMismatch,
    #[error("flow time must be finite and >= 0, got {0}")]
    BadTime(f64),
    #[error("radius {r:.6e} outside (0, {max:.6e}]")]
    RadiusOutOfRange { r: f64, max: f64 },
}

/// One Fourier mode of a potential: k ≥ 1 with cosine and sine amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierMode {
    pub wavenumber: u32,
    pub cos_amp: f64,
    pub sin_amp: f64,
}

impl FourierMode {
    pub fn cosine(wavenumber: u32, amp: f64) -> Self {
        Self {
            wavenumber,
            cos_amp: amp,
            sin_amp: 0.0,
        }
    }
}

/// Fourier description of the three potentials φᵢ defining the initial
/// triple ωᵢ = ωᵢ⁰ − dIᵢdφᵢ. Index 0 of `modes` holds φ₁.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub modes: [Vec<FourierMode>; 3],
    pub grid_size: usize,
}

impl InitialData {
    pub fn flat(grid_size: usize) -> Self {
        Self {
            modes: [Vec::new(), Vec::new(), Vec::new()],
            grid_size,
        }
    }

    /// Add a mode to potential φ_{i+1} (i is 0-based).
    pub fn with_mode(mut self, i: usize, mode: FourierMode) -> Self {
        self.modes[i].push(mode);
        self
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        PeriodicField::constant(self.grid_size, 0.0)?;
        for (i, modes) in self.modes.iter().enumerate() {
            for mode in modes {
                if mode.wavenumber == 0 {
                    return Err(GeometryError::ZeroWavenumber { index: i + 1 });
                }
                if mode.wavenumber as usize >= self.grid_size / 2 {
                    return Err(GeometryError::BandLimit {
                        index: i + 1,
                        wavenumber: mode.wavenumber,
                        grid: self.grid_size,
                    });
                }
            }
        }
        Ok(())
    }

    /// Aᵢ = 1 + φᵢ″ evaluated in closed form (exact for band-limited modes).
    fn coefficient_samples(&self, i: usize) -> Vec<f64> {
        crate::spectral::grid(self.grid_size)
            .into_iter()
            .map(|x| {
                let mut a = 1.0;
                for m in &self.modes[i] {
                    let k = f64::from(m.wavenumber);
                    // φ″ of a·cos(kx) + b·sin(kx) is −k²(a·cos(kx) + b·sin(kx))
                    a -= k * k * (m.cos_amp * (k * x).cos() + m.sin_amp * (k * x).sin());
                }
                a
            })
            .collect()
    }
}

/// The dynamical state of the reduced flow: strictly positive fields
/// (f₁, f₂, V) on the circle at flow time t. f₃ is never stored.
#[derive(Debug, Clone)]
pub struct TripleState {
    f1: PeriodicField,
    f2: PeriodicField,
    v: PeriodicField,
    t: f64,
}

fn check_positive(name: &'static str, f: &PeriodicField) -> Result<(), GeometryError> {
    for (point, &value) in f.values().iter().enumerate() {
        if value <= 0.0 {
            return Err(GeometryError::NonPositive { name, point, value });
        }
    }
    Ok(())
}

impl TripleState {
    pub fn new(
        f1: PeriodicField,
        f2: PeriodicField,
        v: PeriodicField,
        t: f64,
    ) -> Result<Self, GeometryError> {
        if f1.len() != f2.len() || f1.len() != v.len() {
            return Err(GeometryError::GridMismatch);
        }
        if !t.is_finite() || t < 0.0 {
            return Err(GeometryError::BadTime(t));
        }
        check_positive("f1", &f1)?;
        check_positive("f2", &f2)?;
        check_positive("V", &v)?;
        Ok(Self { f1, f2, v, t })
    }

    pub(crate) fn new_unchecked(f1: PeriodicField, f2: PeriodicField, v: PeriodicField, t: f64) -> Self {
        Self { f1, f2, v, t }
    }

    pub fn f1(&self) -> &PeriodicField {
        &self.f1
    }

    pub fn f2(&self) -> &PeriodicField {
        &self.f2
    }

    pub fn v(&self) -> &PeriodicField {
        &self.v
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn grid_size(&self) -> usize {
        self.v.len()
    }

    /// The derived third warping function f₃ = 1/(f₁f₂).
    pub fn f3(&self) -> PeriodicField {
        self.f1.zip_with(&self.f2, |a, b| 1.0 / (a * b))
    }

    /// The three warping functions, f₃ derived.
    pub fn f_fields(&self) -> [PeriodicField; 3] {
        [self.f1.clone(), self.f2.clone(), self.f3()]
    }

    /// Aᵢ = fᵢ·V.
    pub fn a_fields(&self) -> [PeriodicField; 3] {
        let [f1, f2, f3] = self.f_fields();
        [
            f1.zip_with(&self.v, |f, v| f * v),
            f2.zip_with(&self.v, |f, v| f * v),
            f3.zip_with(&self.v, |f, v| f * v),
        ]
    }

    /// max over i and x of fᵢ (the quasi-isometry constant C).
    pub fn max_f(&self) -> f64 {
        let [f1, f2, f3] = self.f_fields();
        f1.max().max(f2.max()).max(f3.max())
    }

    pub fn min_f(&self) -> f64 {
        let [f1, f2, f3] = self.f_fields();
        f1.min().min(f2.min()).min(f3.min())
    }

    pub(crate) fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }
}

/// Build the t = 0 state from potentials. Rejects indefinite data, naming
/// the offending potential and the grid point where Aᵢ dips lowest.
pub fn from_potentials(data: &InitialData) -> Result<TripleState, GeometryError> {
    data.validate()?;
    let n = data.grid_size;
    let grid = crate::spectral::grid(n);
    let a: Vec<Vec<f64>> = (0..3).map(|i| data.coefficient_samples(i)).collect();
    for (i, ai) in a.iter().enumerate() {
        let (point, &value) = ai
            .iter()
            .enumerate()
            .min_by(|(_, x), (_, y)| x.total_cmp(y))
            .expect("non-empty grid");
        if value <= 0.0 {
            return Err(GeometryError::Definiteness {
                index: i + 1,
                point,
                x0: grid[point],
                value,
            });
        }
    }
    // ∫Aᵢ = 2π automatically: φᵢ″ integrates to zero mode by mode.
    debug_assert!(a.iter().all(|ai| {
        (TAU / n as f64 * ai.iter().sum::<f64>() - TAU).abs() < 1e-10
    }));
    let v: Vec<f64> = (0..n).map(|j| (a[0][j] * a[1][j] * a[2][j]).cbrt()).collect();
    let f1: Vec<f64> = (0..n).map(|j| a[0][j] / v[j]).collect();
    let f2: Vec<f64> = (0..n).map(|j| a[1][j] / v[j]).collect();
    TripleState::new(
        PeriodicField::new(f1)?,
        PeriodicField::new(f2)?,
        PeriodicField::new(v)?,
        0.0,
    )
}

/// (log f₁)′ and (log f₂)′, computed as spectral derivatives of log fᵢ.
fn log_derivatives(s: &TripleState) -> (PeriodicField, PeriodicField) {
    (
        s.f1().map(f64::ln).derivative(1),
        s.f2().map(f64::ln).derivative(1),
    )
}

/// Scalar coefficients cᵢ of the torsion 1-forms τᵢ = cᵢ dxᵢ,
///
///   cᵢ = (log fᵢ)′ · fᵢ / V   (equal to (log(Aᵢ/V))′ · Aᵢ/V²).
pub fn torsion_coefficients(s: &TripleState) -> [PeriodicField; 3] {
    let [f1, f2, f3] = s.f_fields();
    let v = s.v().values();
    let coeff = |f: &PeriodicField| {
        let dlog = f.map(f64::ln).derivative(1);
        PeriodicField::from_values_unchecked(
            (0..f.len()).map(|j| dlog.values()[j] * f.values()[j] / v[j]).collect(),
        )
    };
    [coeff(&f1), coeff(&f2), coeff(&f3)]
}

/// The torsion scalar 𝒯 = V⁻² Σᵢ ((log fᵢ)′)², with
/// (log f₃)′ = −(log f₁)′ − (log f₂)′.
pub fn torsion_quantity(s: &TripleState) -> PeriodicField {
    let (l1, l2) = log_derivatives(s);
    let v = s.v().values();
    PeriodicField::from_values_unchecked(
        (0..s.grid_size())
            .map(|j| {
                let a = l1.values()[j];
                let b = l2.values()[j];
                let c = -(a + b);
                (a * a + b * b + c * c) / (v[j] * v[j])
            })
            .collect(),
    )
}

/// The non-vanishing Christoffel symbol families of the warped metric.
#[derive(Debug, Clone)]
pub struct ChristoffelSymbols {
    /// Γ₀₀⁰ = V′/V
    pub gamma_000: PeriodicField,
    /// Γᵢᵢ⁰ = −fᵢ′/(2V²)
    pub gamma_ii0: [PeriodicField; 3],
    /// Γᵢ₀ⁱ = fᵢ′/(2fᵢ)
    pub gamma_i0i: [PeriodicField; 3],
}

/// Curvature of the warped metric g = V²dx₀² + Σ fᵢ dxᵢ².
#[derive(Debug, Clone)]
pub struct Curvature {
    pub christoffel: ChristoffelSymbols,
    /// R₀ᵢ₀ⁱ = fᵢ″/(2fᵢ) − fᵢ′²/(4fᵢ²) − V′fᵢ′/(2Vfᵢ)
    pub riem_0i0i: [PeriodicField; 3],
    /// R₀₀ = −(1/4) Σ (fᵢ′/fᵢ)²
    pub ricci_00: PeriodicField,
    /// Rᵢᵢ = −fᵢ″/(2V²) + V′fᵢ′/(2V³) + fᵢ′²/(4V²fᵢ)
    pub ricci_ii: [PeriodicField; 3],
    /// R = −(1/(2V²)) Σ (fᵢ′/fᵢ)²
    pub scalar: PeriodicField,
}

/// All curvature components. The scalar curvature is assembled from fᵢ′/fᵢ
/// directly, an independent route from [`torsion_quantity`]'s (log fᵢ)′,
/// so R = −𝒯/2 is a genuine cross-check.
pub fn curvature(s: &TripleState) -> Curvature {
    let n = s.grid_size();
    let fs = s.f_fields();
    let v = s.v();
    let vp = v.derivative(1);
    let fp: Vec<PeriodicField> = fs.iter().map(|f| f.derivative(1)).collect();
    let fpp: Vec<PeriodicField> = fs.iter().map(|f| f.derivative(2)).collect();

    let gamma_000 = vp.zip_with(v, |d, v| d / v);
    let build3 = |g: &dyn Fn(usize, usize) -> f64| -> [PeriodicField; 3] {
        [0, 1, 2].map(|i| PeriodicField::from_values_unchecked((0..n).map(|j| g(i, j)).collect()))
    };

    let gamma_ii0 = build3(&|i, j| -fp[i].values()[j] / (2.0 * v.values()[j] * v.values()[j]));
    let gamma_i0i = build3(&|i, j| fp[i].values()[j] / (2.0 * fs[i].values()[j]));
    let riem_0i0i = build3(&|i, j| {
        let f = fs[i].values()[j];
        let d = fp[i].values()[j];
        let dd = fpp[i].values()[j];
        dd / (2.0 * f) - d * d / (4.0 * f * f) - vp.values()[j] * d / (2.0 * v.values()[j] * f)
    });
    let ricci_ii = build3(&|i, j| {
        let f = fs[i].values()[j];
        let d = fp[i].values()[j];
        let dd = fpp[i].values()[j];
        let vv = v.values()[j];
        -dd / (2.0 * vv * vv) + vp.values()[j] * d / (2.0 * vv * vv * vv) + d * d / (4.0 * vv * vv * f)
    });
    let sum_sq: Vec<f64> = (0..n)
        .map(|j| {
            (0..3)
                .map(|i| {
                    let q = fp[i].values()[j] / fs[i].values()[j];
                    q * q
                })
                .sum::<f64>()
        })
        .collect();
    let ricci_00 = PeriodicField::from_values_unchecked(sum_sq.iter().map(|s| -0.25 * s).collect());
    let scalar = PeriodicField::from_values_unchecked(
        (0..n)
            .map(|j| {
                let vv = v.values()[j];
                -sum_sq[j] / (2.0 * vv * vv)
            })
            .collect(),
    );

    Curvature {
        christoffel: ChristoffelSymbols {
            gamma_000,
            gamma_ii0,
            gamma_i0i,
        },
        riem_0i0i,
        ricci_00,
        ricci_ii,
        scalar,
    }
}

/// (total volume, meridian length): the meridian circle has length
/// ∫ V dx₀ and the torus volume is (2π)³ times that.
pub fn volume_and_length(s: &TripleState) -> (f64, f64) {
    let meridian = s.v().integrate();
    (TAU.powi(3) * meridian, meridian)
}

/// Largest admissible radius for [`volume_ratio`] at this state.
pub fn volume_ratio_max_radius(s: &TripleState) -> f64 {
    let (_, meridian) = volume_and_length(s);
    let c = s.max_f();
    (meridian / 2.0).min(std::f64::consts::PI) / (2.0 * c.sqrt())
}

/// Volume ratio Vol(Ω_{r/(2√C)})/r⁴ of the coordinate box inside the
/// geodesic ball of radius r, with C = max fᵢ. Since f̃₁f̃₂f̃₃ ≡ 1, the box
/// volume is (2·r/(2√C))⁴ and the ratio comes out ≥ 1/C².
pub fn volume_ratio(s: &TripleState, r: f64) -> Result<f64, GeometryError> {
    let max = volume_ratio_max_radius(s);
    if !(r > 0.0 && r <= max) {
        return Err(GeometryError::RadiusOutOfRange { r, max });
    }
    let c = s.max_f();
    let half_side = r / (2.0 * c.sqrt());
    let box_volume = (2.0 * half_side).powi(4);
    Ok(box_volume / r.powi(4))
}

/// Every pointwise diagnostic of a state in one bundle.
#[derive(Debug, Clone)]
pub struct GeometryReport {
    /// Aᵢ = fᵢ·V
    pub a: [PeriodicField; 3],
    /// torsion coefficients cᵢ with τᵢ = cᵢ dxᵢ
    pub tau: [PeriodicField; 3],
    /// 𝒯
    pub torsion: PeriodicField,
    pub curvature: Curvature,
    pub meridian_length: f64,
    pub total_volume: f64,
}

pub fn report(s: &TripleState) -> GeometryReport {
    let (total_volume, meridian_length) = volume_and_length(s);
    GeometryReport {
        a: s.a_fields(),
        tau: torsion_coefficients(s),
        torsion: torsion_quantity(s),
        curvature: curvature(s),
        meridian_length,
        total_volume,
    }
}
