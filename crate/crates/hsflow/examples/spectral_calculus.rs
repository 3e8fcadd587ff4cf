//! Periodic calculus on S¹: spectral derivatives, integrals,
//! antiderivatives, and off-grid resampling.
//!
//! ```bash
//! cargo run --example spectral_calculus
//! ```

use hsflow::spectral::grid;
use hsflow::PeriodicField;
use std::f64::consts::{FRAC_PI_3, TAU};

fn main() {
    let n = 32;
    let f = PeriodicField::from_fn(n, |x| (3.0 * x).sin()).unwrap();

    let d = f.derivative(1);
    let mut worst = 0.0f64;
    for (j, x) in grid(n).into_iter().enumerate() {
        worst = worst.max((d.values()[j] - 3.0 * (3.0 * x).cos()).abs());
    }
    println!("derivative of sin(3x) vs 3cos(3x): max error {worst:.3e}");

    let g = PeriodicField::from_fn(n, |x| 1.0 + 0.3 * (2.0 * x).cos()).unwrap();
    println!(
        "∫(1 + 0.3cos2x) = {:.15} (2π = {:.15})",
        g.integrate(),
        TAU
    );

    let cum = PeriodicField::from_fn(n, f64::cos).unwrap().cumulative_integral();
    let mut worst = 0.0f64;
    for (k, &v) in cum.iter().enumerate() {
        worst = worst.max((v - (TAU * k as f64 / n as f64).sin()).abs());
    }
    println!("cumulative integral of cos vs sin: max error {worst:.3e}");

    let c = PeriodicField::from_fn(n, f64::cos).unwrap();
    let at = c.resample(&[FRAC_PI_3]);
    println!("cos resampled at π/3: {:.15} (exact 0.5)", at[0]);

    // The identity that powers conservation: ∫ f' = 0 for every field.
    let rough = PeriodicField::from_fn(n, |x| (x.sin() + 0.2 * (5.0 * x).cos()).exp()).unwrap();
    println!(
        "∫ d/dx exp(sin x + 0.2cos5x) = {:.3e}",
        rough.derivative(1).integrate()
    );
}
