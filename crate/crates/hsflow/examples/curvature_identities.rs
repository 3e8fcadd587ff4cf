//! Closed-form geometry of a simple-type triple: torsion coefficients,
//! the scalar 𝒯, warped-product curvature, and the identity R = −𝒯/2
//! computed through two independent code paths.
//!
//! ```bash
//! cargo run --example curvature_identities
//! ```

use hsflow::cli::check::{scalar_identity_relative_error, seeded_state};
use hsflow::geometry::{self, from_potentials, FourierMode, InitialData};

fn main() {
    // φ₁ = 0.1·cos(x₀) gives A₁ = 1 − 0.1cos(x₀); at x₀ = π/2 (grid
    // point 16 of 64) the closed forms are c₁ = 2/30 and 𝒯 = 0.02/3.
    let data = InitialData::flat(64).with_mode(0, FourierMode::cosine(1, 0.1));
    let state = from_potentials(&data).unwrap();

    let c = geometry::torsion_coefficients(&state);
    let t = geometry::torsion_quantity(&state);
    let curv = geometry::curvature(&state);
    println!("at x₀ = π/2:");
    println!("  c₁ = {:.9}   (closed form 2/30 = {:.9})", c[0].values()[16], 2.0 / 30.0);
    println!("  𝒯  = {:.9}   (closed form 0.02/3 = {:.9})", t.values()[16], 0.02 / 3.0);
    println!("  R  = {:.9}   (−𝒯/2 = {:.9})", curv.scalar.values()[16], -0.01 / 3.0);

    let mut worst = 0.0f64;
    for j in 0..64 {
        worst = worst.max((curv.scalar.values()[j] + t.values()[j] / 2.0).abs());
    }
    println!("max |R + 𝒯/2| over the grid: {worst:.3e}");

    println!("\nR = −𝒯/2 on seeded random states (relative):");
    for seed in 0..5 {
        let err = scalar_identity_relative_error(&seeded_state(seed, 64));
        println!("  seed {seed}: {err:.3e}");
    }

    let (volume, meridian) = geometry::volume_and_length(&state);
    println!("\nmeridian length = {meridian:.12} (≤ 2π by AM-GM)");
    println!("total volume    = {volume:.9}");
    let r = 0.5 * geometry::volume_ratio_max_radius(&state);
    let ratio = geometry::volume_ratio(&state, r).unwrap();
    let c_bound = state.max_f();
    println!(
        "volume ratio at r = {r:.4}: {ratio:.9} (bound 1/C² = {:.9})",
        1.0 / (c_bound * c_bound)
    );
}
