//! The identity check suite behind `hsflow check`: flat fixed point,
//! R = −𝒯/2, the Aᵢ-system residual, f₃ consistency, the gauge round
//! trip, and equality of the lifted reduction, measured against explicit
//! tolerances on seeded states.

use crate::flow;
use crate::g2lift;
use crate::gauge;
use crate::geometry::{self, FourierMode, InitialData, TripleState};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Deterministic random valid initial data: three potentials with modes
/// k = 1..3 and amplitudes small enough that Aᵢ stays well above zero
/// (worst case Σ k²·|amp| ≤ 0.3) and the fields stay resolved at N = 32.
pub fn seeded_initial_data(seed: u64, n: usize) -> InitialData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = InitialData::flat(n);
    for i in 0..3 {
        for k in 1..=3u32 {
            let scale = 0.05 / f64::from(k * k);
            data.modes[i].push(FourierMode {
                wavenumber: k,
                cos_amp: rng.gen_range(-scale..scale),
                sin_amp: rng.gen_range(-scale..scale),
            });
        }
    }
    data
}

pub fn seeded_state(seed: u64, n: usize) -> TripleState {
    geometry::from_potentials(&seeded_initial_data(seed, n)).expect("seeded data is definite")
}

/// A rougher band-limited reference (modes up to k = 2) whose residuals
/// sit well above roundoff at N = 32 but decay below 1e-9 by N = 64,
/// making the spectral-decay measurement meaningful.
pub fn reference_band_limited_data(n: usize) -> InitialData {
    InitialData::flat(n)
        .with_mode(0, FourierMode::cosine(2, 0.08))
        .with_mode(
            1,
            FourierMode {
                wavenumber: 1,
                cos_amp: -0.12,
                sin_amp: 0.08,
            },
        )
}

/// Relative pointwise error of R = −𝒯/2, normalized by max |𝒯|/2.
pub fn scalar_identity_relative_error(s: &TripleState) -> f64 {
    let scalar = geometry::curvature(s).scalar;
    let torsion = geometry::torsion_quantity(s);
    let scale = (torsion.max_abs() / 2.0).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for j in 0..s.grid_size() {
        worst = worst.max((scalar.values()[j] + torsion.values()[j] / 2.0).abs());
    }
    worst / scale
}

/// Max error of the gauge round trip fᵢ(x) = f̂ᵢ(G(x)) on the x-grid.
pub fn gauge_round_trip_error(s: &TripleState) -> f64 {
    let frame = gauge::pull_back(s);
    let images: Vec<f64> = frame.g_map[..s.grid_size()]
        .iter()
        .map(|&g| g.rem_euclid(TAU))
        .collect();
    let mut worst = 0.0f64;
    for (f_hat, f) in frame.f_hat.iter().zip([s.f1(), s.f2(), &s.f3()]) {
        let back = f_hat.resample(&images);
        for (a, b) in back.iter().zip(f.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

pub struct CheckRow {
    pub name: &'static str,
    pub grid: usize,
    pub measured: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

fn flat_fixed_point_error(n: usize) -> f64 {
    let s = geometry::from_potentials(&InitialData::flat(n)).expect("flat data");
    let d = flow::rhs(&s);
    let rhs_err = d.df1.max_abs().max(d.df2.max_abs()).max(d.dv.max_abs());
    let next = flow::step(&s, 0.1).expect("flat step");
    let drift = |f: &crate::spectral::PeriodicField| f.map(|v| (v - 1.0).abs()).max();
    rhs_err
        .max(drift(next.f1()))
        .max(drift(next.f2()))
        .max(drift(next.v()))
}

/// Run the full suite at one grid size. Seeds 0..2 give three random
/// states per identity.
pub fn suite(n: usize) -> Vec<CheckRow> {
    let states: Vec<TripleState> = (0..3).map(|seed| seeded_state(seed, n)).collect();
    let over = |f: &dyn Fn(&TripleState) -> f64| {
        states.iter().map(f).fold(0.0f64, f64::max)
    };
    // N = 32 barely resolves the k = 3 content of the seeded states, so
    // the truncation-limited identities get wider (measured) headroom
    // there; from N = 64 on they are at the advertised tolerances.
    let resolved = n >= 64;
    let eqn_a_tol = if resolved { 1e-9 } else { 1e-5 };
    vec![
        CheckRow {
            name: "flat-fixed-point",
            grid: n,
            measured: flat_fixed_point_error(n),
            tolerance: 1e-13,
        },
        CheckRow {
            name: "scalar-curvature-identity",
            grid: n,
            measured: over(&scalar_identity_relative_error),
            tolerance: if resolved { 1e-10 } else { 1e-5 },
        },
        CheckRow {
            name: "eqnA-residual",
            grid: n,
            measured: over(&flow::eqn_a_residual),
            tolerance: eqn_a_tol,
        },
        CheckRow {
            name: "f3-consistency",
            grid: n,
            measured: over(&flow::rhs_f3_consistency),
            tolerance: eqn_a_tol,
        },
        CheckRow {
            name: "gauge-round-trip",
            grid: n,
            measured: over(&gauge_round_trip_error),
            tolerance: if resolved { 1e-8 } else { 1e-6 },
        },
        CheckRow {
            name: "lift-residual-equality",
            grid: n,
            measured: over(&|s| {
                (g2lift::laplacian_flow_residual(s) - flow::eqn_a_residual(s)).abs()
            }),
            tolerance: 1e-14,
        },
    ]
}

/// eqnA residuals of the rough reference state at N and 2N; the ratio
/// should beat the one-octave N⁻⁴ factor of 16 by a wide margin.
pub fn spectral_decay(n: usize) -> (f64, f64) {
    let coarse = geometry::from_potentials(&reference_band_limited_data(n)).expect("definite");
    let fine = geometry::from_potentials(&reference_band_limited_data(2 * n)).expect("definite");
    (flow::eqn_a_residual(&coarse), flow::eqn_a_residual(&fine))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_data_is_deterministic_and_definite() {
        let a = seeded_initial_data(7, 64);
        let b = seeded_initial_data(7, 64);
        for i in 0..3 {
            assert_eq!(a.modes[i], b.modes[i]);
        }
        for seed in 0..10 {
            let s = seeded_state(seed, 64);
            assert!(s.min_f() > 0.0);
        }
    }

    #[test]
    fn suite_passes_at_32_and_64() {
        for n in [32, 64] {
            for row in suite(n) {
                assert!(
                    row.passed(),
                    "{} at N={} measured {:.3e} > tol {:.1e}",
                    row.name,
                    row.grid,
                    row.measured,
                    row.tolerance
                );
            }
        }
    }

    #[test]
    fn reference_residual_decays_spectrally() {
        let (coarse, fine) = spectral_decay(32);
        assert!(coarse > 1e-12, "coarse residual {coarse:.3e} sits at roundoff");
        assert!(fine < 1e-9);
        assert!(coarse / fine > 16.0);
    }
}
