//! The arc-length gauge: G_t(x₀) = (2π/v_t)·∫₀^{x₀} V(x′, t) dx′ with
//! v_t = ∫V. Pulling the triple back by G_t⁻¹ puts the metric in the form
//! dy² + Σ f̂ᵢ dxᵢ², and convergence of the flow is read off from
//! (v_t/2π)·f̂ᵢ → 1.
//!
//! G_t is inverted pointwise (bisection to 1e−13 plus one Newton polish
//! with G′ = (2π/v_t)·V), which stays monotone no matter how non-uniform
//! V is; f̂ᵢ is then spectral resampling of fᵢ at G_t⁻¹(y), and
//! f̂₃ = 1/(f̂₁f̂₂) keeps the product identity structural.

use crate::flow::TrajectoryRecord;
use crate::geometry::TripleState;
use crate::spectral::{grid, Antiderivative, PeriodicField, TrigInterpolant};
use std::f64::consts::TAU;

/// The circle diffeomorphism G_t, sampled and continuously evaluable.
#[derive(Debug, Clone)]
pub struct GaugeMap {
    pub t: f64,
    /// v_t = ∫ V dx₀ (the meridian length).
    pub vt: f64,
    /// G_t at the grid points, length N+1 with samples[0] = 0 and
    /// samples[N] = 2π (up to roundoff).
    pub samples: Vec<f64>,
    cumulative: Antiderivative,
    v_interp: TrigInterpolant,
}

/// Construct the gauge map of a state. V > 0 guarantees strict monotonicity.
pub fn gauge_map(s: &TripleState) -> GaugeMap {
    let vt = s.v().integrate();
    let scale = TAU / vt;
    let samples = s
        .v()
        .cumulative_integral()
        .into_iter()
        .map(|f| scale * f)
        .collect();
    GaugeMap {
        t: s.t(),
        vt,
        samples,
        cumulative: Antiderivative::new(s.v()),
        v_interp: TrigInterpolant::new(s.v()),
    }
}

impl GaugeMap {
    pub fn eval(&self, x: f64) -> f64 {
        TAU / self.vt * self.cumulative.eval(x)
    }

    /// Solve G(x) = y on [0, 2π]: bisection to 1e−13, one Newton polish.
    pub fn invert(&self, y: f64) -> f64 {
        let mut lo = 0.0f64;
        let mut hi = TAU;
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        let slope = TAU / self.vt * self.v_interp.eval(x);
        if slope > 0.0 {
            x -= (self.eval(x) - y) / slope;
        }
        x.clamp(0.0, TAU)
    }
}

/// The pulled-back triple on the uniform y-grid.
#[derive(Debug, Clone)]
pub struct GaugeFrame {
    pub t: f64,
    pub vt: f64,
    /// G_t at the x-grid points (length N+1).
    pub g_map: Vec<f64>,
    /// f̂ᵢ(y) = fᵢ(G_t⁻¹(y)); f̂₃ derived from the other two.
    pub f_hat: [PeriodicField; 3],
    /// y-means of f̂ᵢ, the finite-time proxies for the limit constants cᵢ.
    pub c_estimates: [f64; 3],
}

impl GaugeFrame {
    /// maxᵢ sup_y |(v_t/2π)·f̂ᵢ(y) − 1|.
    pub fn dist_to_standard(&self) -> f64 {
        let scale = self.vt / TAU;
        self.f_hat
            .iter()
            .map(|f| {
                f.values()
                    .iter()
                    .fold(0.0f64, |m, &v| m.max((scale * v - 1.0).abs()))
            })
            .fold(0.0, f64::max)
    }

    /// (v_t/2π)·cᵢ, which the cohomology normalization forces to 1 in the
    /// limit.
    pub fn c_times_v(&self) -> [f64; 3] {
        self.c_estimates.map(|c| self.vt / TAU * c)
    }
}

/// Invert the gauge on the uniform y-grid and resample the warpings there.
pub fn pull_back(s: &TripleState) -> GaugeFrame {
    let map = gauge_map(s);
    let n = s.grid_size();
    let preimages: Vec<f64> = grid(n).into_iter().map(|y| map.invert(y)).collect();
    let f_hat1 = PeriodicField::from_values_unchecked(s.f1().resample(&preimages));
    let f_hat2 = PeriodicField::from_values_unchecked(s.f2().resample(&preimages));
    let f_hat3 = f_hat1.zip_with(&f_hat2, |a, b| 1.0 / (a * b));
    let mean = |f: &PeriodicField| f.values().iter().sum::<f64>() / n as f64;
    let c_estimates = [mean(&f_hat1), mean(&f_hat2), mean(&f_hat3)];
    GaugeFrame {
        t: s.t(),
        vt: map.vt,
        g_map: map.samples,
        f_hat: [f_hat1, f_hat2, f_hat3],
        c_estimates,
    }
}

/// Convergence diagnostics of one snapshot.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRecord {
    pub t: f64,
    pub vt: f64,
    pub dist_to_standard: f64,
    pub c_times_v: [f64; 3],
}

/// Convergence diagnostics along a trajectory.
#[derive(Debug, Clone)]
pub struct ConvergenceSummary {
    pub records: Vec<ConvergenceRecord>,
    pub final_dist: f64,
    /// Whether dist_to_standard is non-increasing (within 1e−12) over the
    /// latter half of the snapshots: the finite-time proxy for monotone
    /// convergence.
    pub eventually_decreasing: bool,
}

pub fn convergence_metrics(record: &TrajectoryRecord) -> ConvergenceSummary {
    let records: Vec<ConvergenceRecord> = record
        .snapshots
        .iter()
        .map(|snap| {
            let frame = pull_back(&snap.state);
            ConvergenceRecord {
                t: snap.t,
                vt: frame.vt,
                dist_to_standard: frame.dist_to_standard(),
                c_times_v: frame.c_times_v(),
            }
        })
        .collect();
    let final_dist = records.last().map_or(0.0, |r| r.dist_to_standard);
    let tail = &records[records.len() / 2..];
    let eventually_decreasing = tail
        .windows(2)
        .all(|w| w[1].dist_to_standard <= w[0].dist_to_standard + 1e-12);
    ConvergenceSummary {
        records,
        final_dist,
        eventually_decreasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{self, FourierMode, InitialData};
    use proptest::prelude::*;

    fn cosine_state(n: usize, amp: f64) -> TripleState {
        geometry::from_potentials(&InitialData::flat(n).with_mode(0, FourierMode::cosine(1, amp)))
            .unwrap()
    }

    #[test]
    fn flat_gauge_map_is_identity() {
        let s = geometry::from_potentials(&InitialData::flat(64)).unwrap();
        let map = gauge_map(&s);
        assert!((map.vt - TAU).abs() < 1e-13);
        for (k, &g) in map.samples.iter().enumerate() {
            assert!((g - TAU * k as f64 / 64.0).abs() < 1e-13);
        }
    }

    #[test]
    fn synthetic_midpoint_symmetry() {
        // V = 1 + 0.5cos maps π to π by odd symmetry of the fluctuation.
        let f = PeriodicField::constant(64, 1.0).unwrap();
        let v = PeriodicField::from_fn(64, |x| 1.0 + 0.5 * x.cos()).unwrap();
        let s = TripleState::new(f.clone(), f, v, 0.0).unwrap();
        let map = gauge_map(&s);
        assert!((map.vt - TAU).abs() < 1e-13);
        assert!((map.samples[32] - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn inversion_round_trip() {
        let s = cosine_state(64, 0.3);
        let map = gauge_map(&s);
        for &x in &[0.0, 0.37, 1.8, 3.2, 5.5] {
            let y = map.eval(x);
            assert!((map.invert(y) - x).abs() < 1e-11);
        }
    }

    #[test]
    fn flat_pull_back() {
        let s = geometry::from_potentials(&InitialData::flat(64)).unwrap();
        let frame = pull_back(&s);
        for f in &frame.f_hat {
            assert!(f.map(|v| (v - 1.0).abs()).max() < 1e-13);
        }
        for c in frame.c_estimates {
            assert!((c - 1.0).abs() < 1e-13);
        }
        assert!(frame.dist_to_standard() < 1e-13);
    }

    #[test]
    fn pulled_back_product_identity() {
        let frame = pull_back(&cosine_state(64, 0.1));
        for j in 0..64 {
            let p = frame.f_hat[0].values()[j] * frame.f_hat[1].values()[j]
                * frame.f_hat[2].values()[j];
            assert!((p - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn round_trip_recovers_warpings() {
        let s = cosine_state(64, 0.1);
        let frame = pull_back(&s);
        // f̂ᵢ(G(x)) should reproduce fᵢ(x) on the x-grid.
        let images: Vec<f64> = frame.g_map[..64].iter().map(|&g| g.rem_euclid(TAU)).collect();
        for (f_hat, f) in frame.f_hat.iter().zip([s.f1(), s.f2(), &s.f3()]) {
            let back = f_hat.resample(&images);
            for (a, b) in back.iter().zip(f.values()) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn initial_dist_matches_direct_evaluation() {
        let s = cosine_state(64, 0.1);
        let frame = pull_back(&s);
        // The extrema of fᵢ sit at the grid points x = 0 and π, so the
        // x-grid sup of |(v/2π)fᵢ − 1| is the continuum sup.
        let scale = s.v().integrate() / TAU;
        let direct = [s.f1(), s.f2(), &s.f3()]
            .iter()
            .map(|f| f.map(|v| (scale * v - 1.0).abs()).max())
            .fold(0.0, f64::max);
        assert!((frame.dist_to_standard() - direct).abs() < 1e-9);
    }

    #[test]
    fn c_times_v_is_one_by_cohomology() {
        // ∫f̂ᵢ dy = (2π/v)∫Aᵢ dx₀ = (2π)²/v, so (v/2π)·mean(f̂ᵢ) = 1
        // already at finite time, up to quadrature error.
        let frame = pull_back(&cosine_state(64, 0.1));
        for c in frame.c_times_v() {
            assert!((c - 1.0).abs() < 1e-10);
        }
    }

    proptest! {
        /// Gauge maps of positive band-limited V are strictly increasing
        /// with the exact endpoints.
        #[test]
        fn gauge_map_monotone(a in -0.4..0.4f64, b in -0.2..0.2f64) {
            let f = PeriodicField::constant(64, 1.0).unwrap();
            let v = PeriodicField::from_fn(64, |x| 1.0 + a * x.cos() + b * (2.0 * x).sin()).unwrap();
            let s = TripleState::new(f.clone(), f, v, 0.0).unwrap();
            let map = gauge_map(&s);
            prop_assert!(map.samples[0].abs() < 1e-15);
            prop_assert!((map.samples[64] - TAU).abs() < 1e-12);
            for w in map.samples.windows(2) {
                prop_assert!(w[1] > w[0]);
            }
        }
    }
}
