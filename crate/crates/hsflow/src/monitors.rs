//! Verdicts for the a-priori estimates, evaluated against a completed
//! trajectory with explicit tolerances.
//!
//! Every estimate is exact in the continuum; the tolerances make the
//! discrete slack visible and tunable instead of hiding it in the checks.
//! A verdict's `worst_margin` is the smallest slack observed (allowed
//! value minus observed value, tolerance included); negative means the
//! estimate failed, and `at_time` points at the offender.

use crate::flow::{torsion_decay_bound, TrajectoryRecord};
use std::f64::consts::TAU;

/// Default tolerance for identity-class checks (conservation laws that
/// hold to quadrature accuracy).
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
/// Default tolerance for dynamics-class estimates (bounds on evolved
/// quantities, limited by time-integration accuracy).
pub const DYNAMICS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateVerdict {
    pub name: &'static str,
    pub passed: bool,
    /// Most negative slack observed (positive when the estimate holds).
    pub worst_margin: f64,
    /// Monitor time at which the worst margin occurred.
    pub at_time: f64,
    pub tolerance: f64,
}

/// Tolerances for the four verdicts, with the documented defaults.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub decay: f64,
    pub conservation: f64,
    pub quasi_isometry: f64,
    pub volume: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            decay: DYNAMICS_TOLERANCE,
            conservation: IDENTITY_TOLERANCE,
            quasi_isometry: DYNAMICS_TOLERANCE,
            volume: IDENTITY_TOLERANCE,
        }
    }
}

struct MarginTracker {
    worst: f64,
    at: f64,
}

impl MarginTracker {
    fn new() -> Self {
        Self {
            worst: f64::INFINITY,
            at: 0.0,
        }
    }

    fn observe(&mut self, margin: f64, t: f64) {
        if margin < self.worst {
            self.worst = margin;
            self.at = t;
        }
    }

    fn verdict(self, name: &'static str, tolerance: f64) -> EstimateVerdict {
        EstimateVerdict {
            name,
            passed: self.worst >= 0.0,
            worst_margin: self.worst,
            at_time: self.at,
            tolerance,
        }
    }
}

/// max 𝒯(t) ≤ 𝒯₀/(1 + 𝒯₀t/3) + tol at every monitor time, and the
/// max 𝒯 series is non-increasing within tol.
pub fn check_decay(record: &TrajectoryRecord, tol: f64) -> EstimateVerdict {
    let mut tracker = MarginTracker::new();
    let t0 = record.max_t.first().copied().unwrap_or(0.0);
    for (i, &t) in record.times.iter().enumerate() {
        let bound = torsion_decay_bound(t0, t);
        tracker.observe(bound + tol - record.max_t[i], t);
    }
    for i in 1..record.times.len() {
        tracker.observe(record.max_t[i - 1] + tol - record.max_t[i], record.times[i]);
    }
    tracker.verdict("torsion-decay", tol)
}

/// Meridian length stays in [len(0), l̄ + tol] with l̄ from the wedge
/// integrals of the initial triple (2π for this cohomology class), and the
/// total volume is non-decreasing within tol.
pub fn check_volume_bounds(record: &TrajectoryRecord, tol: f64) -> EstimateVerdict {
    let mut tracker = MarginTracker::new();
    let lower = record.meridian_length.first().copied().unwrap_or(TAU);
    // l̄ = (1/(6(2π)³))·Σ[ωᵢ]²[T⁴]; each wedge square integrates to
    // 2(2π)³·∫Aᵢ dx₀, giving (∫A₁ + ∫A₂ + ∫A₃)/3.
    let upper = record
        .snapshots
        .first()
        .map(|snap| {
            snap.state
                .a_fields()
                .iter()
                .map(|a| a.integrate())
                .sum::<f64>()
                / 3.0
        })
        .unwrap_or(TAU);
    for (i, &t) in record.times.iter().enumerate() {
        tracker.observe(record.meridian_length[i] - lower + tol, t);
        tracker.observe(upper + tol - record.meridian_length[i], t);
    }
    for i in 1..record.times.len() {
        tracker.observe(
            record.total_volume[i] - record.total_volume[i - 1] + tol,
            record.times[i],
        );
    }
    tracker.verdict("volume-bounds", tol)
}

/// C(t) = max fᵢ is non-increasing within tol, and min fᵢ stays above
/// 1/C(0)² − tol (from f₁f₂f₃ = 1 and the maximum principle).
pub fn check_quasi_isometry(record: &TrajectoryRecord, tol: f64) -> EstimateVerdict {
    let mut tracker = MarginTracker::new();
    let c0 = record.max_f.first().copied().unwrap_or(1.0);
    for (i, &t) in record.times.iter().enumerate() {
        tracker.observe(record.min_f[i] - 1.0 / (c0 * c0) + tol, t);
    }
    for i in 1..record.times.len() {
        tracker.observe(record.max_f[i - 1] + tol - record.max_f[i], record.times[i]);
    }
    tracker.verdict("quasi-isometry", tol)
}

/// |∫Aᵢ dx₀ − 2π| ≤ tol at every snapshot, for all i.
pub fn check_conservation(record: &TrajectoryRecord, tol: f64) -> EstimateVerdict {
    let mut tracker = MarginTracker::new();
    for snap in &record.snapshots {
        for a in snap.state.a_fields() {
            tracker.observe(tol - (a.integrate() - TAU).abs(), snap.t);
        }
    }
    tracker.verdict("conservation", tol)
}

/// All four verdicts at the given tolerances.
pub fn check_all(record: &TrajectoryRecord, tolerances: &Tolerances) -> Vec<EstimateVerdict> {
    vec![
        check_decay(record, tolerances.decay),
        check_volume_bounds(record, tolerances.volume),
        check_quasi_isometry(record, tolerances.quasi_isometry),
        check_conservation(record, tolerances.conservation),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{self, FlowConfig};
    use crate::geometry::{from_potentials, FourierMode, InitialData};

    fn short_run(amp: f64) -> TrajectoryRecord {
        let data = InitialData::flat(64).with_mode(0, FourierMode::cosine(1, amp));
        let cfg = FlowConfig {
            t_end: 1.0,
            cfl_safety: 0.25,
            max_steps: 100_000,
            snapshot_every: 0.5,
            monitor_every: 0.1,
        };
        flow::run(&data, &cfg).unwrap()
    }

    #[test]
    fn flat_trajectory_passes_everything() {
        let cfg = FlowConfig {
            t_end: 1.0,
            cfl_safety: 0.25,
            max_steps: 100_000,
            snapshot_every: 0.5,
            monitor_every: 0.25,
        };
        let record = flow::run(&InitialData::flat(32), &cfg).unwrap();
        for verdict in check_all(&record, &Tolerances::default()) {
            assert!(verdict.passed, "{} failed: {:?}", verdict.name, verdict);
        }
        // Equality case of the volume bound: meridian ≡ 2π = l̄.
        let volume = check_volume_bounds(&record, 1e-9);
        assert!(volume.worst_margin <= 1e-9 + 1e-12);
    }

    #[test]
    fn small_data_run_passes_everything() {
        let record = short_run(0.1);
        for verdict in check_all(&record, &Tolerances::default()) {
            assert!(verdict.passed, "{} failed: {:?}", verdict.name, verdict);
        }
    }

    #[test]
    fn decay_rejects_a_constant_torsion_series() {
        let mut record = short_run(0.1);
        let t0 = record.max_t[0];
        assert!(t0 > 0.0);
        for v in record.max_t.iter_mut() {
            *v = t0;
        }
        let verdict = check_decay(&record, 1e-9);
        assert!(!verdict.passed);
        assert!(verdict.worst_margin < 0.0);
        assert!(verdict.at_time > 0.0);
    }

    #[test]
    fn quasi_isometry_rejects_growing_max_f() {
        let mut record = short_run(0.1);
        let last = record.max_f.len() - 1;
        record.max_f[last] = record.max_f[0] + 0.1;
        assert!(!check_quasi_isometry(&record, 1e-6).passed);
    }

    #[test]
    fn conservation_rejects_a_clipped_state() {
        let mut record = short_run(0.1);
        // Clip f₁ from below the way a positivity hack would; ∫A₁ drifts.
        let snap = record.snapshots.last_mut().unwrap();
        let clipped = snap.state.f1().map(|v| v.max(1.0));
        snap.state = crate::geometry::TripleState::new(
            clipped,
            snap.state.f2().clone(),
            snap.state.v().clone(),
            snap.state.t(),
        )
        .unwrap();
        assert!(!check_conservation(&record, 1e-9).passed);
    }

    #[test]
    fn verdicts_are_deterministic() {
        let record = short_run(0.1);
        let a = check_all(&record, &Tolerances::default());
        let b = check_all(&record, &Tolerances::default());
        assert_eq!(a, b);
    }

    #[test]
    fn margins_do_not_degrade_under_refinement() {
        // Same continuum problem at N = 64 and N = 128 (the CFL step
        // shrinks 4x with the grid): every verdict margin at the finer
        // resolution is no worse than at the coarser one.
        let run_at = |n: usize| {
            let data = InitialData::flat(n).with_mode(0, FourierMode::cosine(1, 0.1));
            let cfg = FlowConfig {
                t_end: 1.0,
                cfl_safety: 0.25,
                max_steps: 1_000_000,
                snapshot_every: 0.5,
                monitor_every: 0.1,
            };
            flow::run(&data, &cfg).unwrap()
        };
        let coarse = check_all(&run_at(64), &Tolerances::default());
        let fine = check_all(&run_at(128), &Tolerances::default());
        for (c, f) in coarse.iter().zip(&fine) {
            assert!(f.passed, "{} failed at N=128", f.name);
            assert!(
                f.worst_margin >= c.worst_margin - 1e-9,
                "{}: margin degraded {:.3e} -> {:.3e}",
                c.name,
                c.worst_margin,
                f.worst_margin
            );
        }
    }

    #[test]
    fn volume_upper_bound_matches_wedge_oracle() {
        let record = short_run(0.2);
        // The wedge-integration value for this class is 2π; the verdict
        // must use it (margin relative to 2π + tol).
        let verdict = check_volume_bounds(&record, 1e-9);
        assert!(verdict.passed);
        let final_len = *record.meridian_length.last().unwrap();
        assert!(final_len <= TAU + 1e-9);
        let s = from_potentials(
            &InitialData::flat(64).with_mode(0, FourierMode::cosine(1, 0.2)),
        )
        .unwrap();
        let upper: f64 = s.a_fields().iter().map(|a| a.integrate()).sum::<f64>() / 3.0;
        assert!((upper - TAU).abs() < 1e-12);
    }
}
