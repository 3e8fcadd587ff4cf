//! Hypersymplectic flow of simple type on the 4-torus, reduced to a
//! periodic system on S¹ and solved pseudospectrally.
//!
//! A simple-type hypersymplectic triple on T⁴ is determined by three
//! potentials φᵢ(x₀); the flow ∂ₜωᵢ = dτᵢ reduces to the degenerate
//! parabolic system for (f₁, f₂, V) evolved by [`flow`]. The crate
//! verifies the closed-form geometry along the way:
//!
//! * [`geometry`] — the triple, torsion coefficients, the scalar
//!   𝒯 = V⁻²Σ((log fᵢ)′)², warped-product curvature with R = −𝒯/2, and
//!   the volume/meridian bounds;
//! * [`flow`] — RK4 with a diffusion-limited adaptive step, positivity by
//!   reject-and-halve, conservation of ∫Aᵢ, and the residuals tying the
//!   stepped system to the equivalent Aᵢ system and the V² integral
//!   identity;
//! * [`gauge`] — the arc-length diffeomorphism G_t and the pulled-back
//!   triple quantifying convergence to the standard hyperKähler
//!   structure;
//! * [`g2lift`] — the closed G₂-structure on T⁷ and the componentwise
//!   Laplacian-flow reduction;
//! * [`monitors`] — pass/fail verdicts for the a-priori estimates
//!   (torsion decay, volume bounds, quasi-isometry, conservation);
//! * [`cli`] — configs, CSV output, the check suite, and sweeps behind
//!   the `hsflow` binary.
//!
//! Start with the examples: `cargo run --example small_data_run`.

pub mod cli;
pub mod flow;
pub mod g2lift;
pub mod gauge;
pub mod geometry;
pub mod monitors;
pub mod spectral;

pub use flow::{FlowConfig, TrajectoryRecord};
pub use geometry::{FourierMode, InitialData, TripleState};
pub use spectral::PeriodicField;
