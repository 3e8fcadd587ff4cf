//! Lift of a simple-type triple to the closed G₂-structure on T⁷ = T⁴×T³,
//!
//!   φ = dt₁∧dt₂∧dt₃ − Σᵢ dtᵢ∧ωᵢ,
//!
//! represented by its nonzero coefficients in the fixed coframe
//! {dtᵢ, dx_μ}. The intrinsic torsion form is 𝛕 = Σ dtᵢ∧τᵢ, and the
//! Laplacian flow ∂ₜφ = d𝛕 reduces componentwise to ∂ₜAᵢ = cᵢ′ on the
//! dtᵢ∧dx₀∧dxᵢ slots. No general exterior-algebra engine is needed: the
//! reduction is fixed and finite.

use crate::flow;
use crate::geometry::{self, TripleState};
use crate::spectral::PeriodicField;

/// Nonzero coefficients of φ and of the torsion 2-form 𝛕.
#[derive(Debug, Clone)]
pub struct G2Coefficients {
    /// Coefficient of dt₁∧dt₂∧dt₃ (always 1).
    pub dt123: f64,
    /// Coefficients of dtᵢ∧dx₀∧dxᵢ: the fields −Aᵢ(x₀).
    pub dt_dx0_dxi: [PeriodicField; 3],
    /// Coefficients of dt₁∧dx₂∧dx₃, dt₂∧dx₃∧dx₁, dt₃∧dx₁∧dx₂ (always −1).
    pub dt_dxj_dxk: [f64; 3],
    /// Coefficients cᵢ of 𝛕 on dtᵢ∧dxᵢ.
    pub torsion: [PeriodicField; 3],
}

pub fn lift(s: &TripleState) -> G2Coefficients {
    let a = s.a_fields();
    G2Coefficients {
        dt123: 1.0,
        dt_dx0_dxi: a.map(|f| f.map(|v| -v)),
        dt_dxj_dxk: [-1.0; 3],
        torsion: geometry::torsion_coefficients(s),
    }
}

impl G2Coefficients {
    /// Bookkeeping for dφ: the exterior derivative wedges dx₀ onto each
    /// slot with the coefficient's x₀-derivative. Constant slots
    /// contribute zero, and every x₀-dependent slot already contains dx₀,
    /// so its contribution is annihilated. Returns the largest surviving
    /// coefficient of dφ, identically zero for this ansatz.
    pub fn d_phi_max_coefficient(&self) -> f64 {
        // (coefficient slot, basis contains dx₀)
        let field_slots: [(&PeriodicField, bool); 3] = [
            (&self.dt_dx0_dxi[0], true),
            (&self.dt_dx0_dxi[1], true),
            (&self.dt_dx0_dxi[2], true),
        ];
        let mut worst = 0.0f64;
        for (coeff, contains_dx0) in field_slots {
            if !contains_dx0 {
                worst = worst.max(coeff.derivative(1).max_abs());
            }
        }
        // dt₁₂₃ and the dtᵢ∧dxⱼ∧dxₖ slots are constants: d of them is zero.
        worst
    }
}

/// Componentwise residual of ∂ₜφ = d𝛕: on the dtᵢ∧dx₀∧dxᵢ slots both
/// sides reduce to −∂ₜAᵢ and −cᵢ′, so this returns
/// maxᵢ max_x |∂ₜAᵢ − cᵢ′| with ∂ₜAᵢ assembled from [`flow::rhs`] via the
/// product rule. The same quantity as [`flow::eqn_a_residual`], reduced
/// through the lifted coefficients.
pub fn laplacian_flow_residual(s: &TripleState) -> f64 {
    let lifted = lift(s);
    let d = flow::rhs(s);
    let n = s.grid_size();
    let f3 = s.f3();
    let df3 = PeriodicField::from_values_unchecked(
        (0..n)
            .map(|j| {
                -f3.values()[j]
                    * (d.df1.values()[j] / s.f1().values()[j]
                        + d.df2.values()[j] / s.f2().values()[j])
            })
            .collect(),
    );
    let product = |f: &PeriodicField, df: &PeriodicField| {
        PeriodicField::from_values_unchecked(
            (0..n)
                .map(|j| s.v().values()[j] * df.values()[j] + f.values()[j] * d.dv.values()[j])
                .collect(),
        )
    };
    let adot = [
        product(s.f1(), &d.df1),
        product(s.f2(), &d.df2),
        product(&f3, &df3),
    ];
    let mut worst = 0.0f64;
    for (a, c) in adot.iter().zip(&lifted.torsion) {
        let rhs_side = c.derivative(1);
        for j in 0..a.len() {
            worst = worst.max((a.values()[j] - rhs_side.values()[j]).abs());
        }
    }
    worst
}
