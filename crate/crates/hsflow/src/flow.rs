//! Time integration of the reduced flow in its degenerate form
//!
//!   ∂ₜfᵢ = (1/V)(fᵢ″/V − fᵢ′V′/V²) − fᵢ𝒯/3   (i = 1, 2)
//!   ∂ₜV  = 𝒯V/3
//!
//! with 𝒯 from [`crate::geometry::torsion_quantity`]. Only (f₁, f₂, V) are
//! stepped; the V equation is an ODE in x₀, so no artificial diffusion
//! enters the degenerate direction. The equivalent Aᵢ system
//! ∂ₜAᵢ = (cᵢ)′ is kept as a residual check ([`eqn_a_residual`]), as is
//! the chain-rule consistency of the eliminated f₃ equation
//! ([`rhs_f3_consistency`]) and the time-integrated V² identity
//! ([`v2_integral_residual`]).
//!
//! Stepping is classical RK4 under the explicit diffusion limit
//! dt = safety·(min V)²·Δx²/2 coming from the stiffest term fᵢ″/V².
//! Positivity is enforced by reject-and-halve, never by clipping.

use crate::gauge;
use crate::geometry::{self, GeometryError, InitialData, TripleState};
use crate::spectral::PeriodicField;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid flow config: {0}")]
    Config(String),
    #[error("positivity lost at t = {t:.6e} ({reason}); dt halved {halvings} times from {dt0:.3e}")]
    PositivityLoss {
        t: f64,
        reason: String,
        halvings: u32,
        dt0: f64,
        /// Last state that still satisfied all invariants.
        last_state: Box<TripleState>,
    },
}

/// A rejected step: some output sample left the admissible cone.
#[derive(Debug, Error)]
#[error("{field} became {value:.6e} at grid point {point}")]
pub struct StepRejected {
    pub field: &'static str,
    pub point: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub t_end: f64,
    /// Fraction of the explicit diffusion limit, in (0, 1].
    pub cfl_safety: f64,
    pub max_steps: usize,
    /// Cadence of full field snapshots.
    pub snapshot_every: f64,
    /// Cadence of scalar monitor rows.
    pub monitor_every: f64,
}

impl FlowConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            cfl_safety: 0.25,
            max_steps: 50_000_000,
            snapshot_every: t_end / 4.0,
            monitor_every: t_end / 100.0,
        }
    }

    fn validate(&self) -> Result<(), FlowError> {
        let bad = |msg: &str| Err(FlowError::Config(msg.to_string()));
        if self.t_end <= 0.0 || !self.t_end.is_finite() {
            return bad("t_end must be positive and finite");
        }
        if self.cfl_safety <= 0.0 || self.cfl_safety > 1.0 || self.cfl_safety.is_nan() {
            return bad("cfl_safety must lie in (0, 1]");
        }
        if self.snapshot_every <= 0.0 || self.snapshot_every.is_nan() {
            return bad("snapshot_every must be positive");
        }
        if self.monitor_every <= 0.0 || self.monitor_every.is_nan() {
            return bad("monitor_every must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        Ok(())
    }
}

/// Right-hand side of the degenerate system.
#[derive(Debug, Clone)]
pub struct Derivs {
    pub df1: PeriodicField,
    pub df2: PeriodicField,
    pub dv: PeriodicField,
}

/// Evaluate the degenerate-system right-hand side at a state.
pub fn rhs(s: &TripleState) -> Derivs {
    let torsion = geometry::torsion_quantity(s);
    let vp = s.v().derivative(1);
    let v = s.v().values();
    let tt = torsion.values();
    let diffuse = |f: &PeriodicField| {
        let (fp, fpp) = f.derivatives_12();
        PeriodicField::from_values_unchecked(
            (0..f.len())
                .map(|j| {
                    (fpp.values()[j] / v[j] - fp.values()[j] * vp.values()[j] / (v[j] * v[j])) / v[j]
                        - f.values()[j] * tt[j] / 3.0
                })
                .collect(),
        )
    };
    Derivs {
        df1: diffuse(s.f1()),
        df2: diffuse(s.f2()),
        dv: torsion.zip_with(s.v(), |t, v| t * v / 3.0),
    }
}

/// ∂ₜAᵢ = V·∂ₜfᵢ + fᵢ·∂ₜV, with ∂ₜf₃ by the chain rule on f₃ = 1/(f₁f₂).
fn a_dot(s: &TripleState, d: &Derivs) -> [PeriodicField; 3] {
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
    [
        product(s.f1(), &d.df1),
        product(s.f2(), &d.df2),
        product(&f3, &df3),
    ]
}

/// Max discrepancy between ∂ₜAᵢ assembled from the stepped system and the
/// right side (cᵢ)′ of the Aᵢ system. Spectrally small on resolved states.
pub fn eqn_a_residual(s: &TripleState) -> f64 {
    let adot = a_dot(s, &rhs(s));
    let coeffs = geometry::torsion_coefficients(s);
    let mut worst = 0.0f64;
    for (a, c) in adot.iter().zip(&coeffs) {
        let rhs_side = c.derivative(1);
        for j in 0..a.len() {
            worst = worst.max((a.values()[j] - rhs_side.values()[j]).abs());
        }
    }
    worst
}

/// Max discrepancy between the closed-form f₃ evolution and the chain rule
/// −f₃(∂ₜf₁/f₁ + ∂ₜf₂/f₂), i.e. the eliminated equation of the system.
pub fn rhs_f3_consistency(s: &TripleState) -> f64 {
    let d = rhs(s);
    let f3 = s.f3();
    let torsion = geometry::torsion_quantity(s);
    let vp = s.v().derivative(1);
    let (f3p, f3pp) = f3.derivatives_12();
    let v = s.v().values();
    let mut worst = 0.0f64;
    for (j, &vj) in v.iter().enumerate() {
        let closed = (f3pp.values()[j] / vj - f3p.values()[j] * vp.values()[j] / (vj * vj)) / vj
            - f3.values()[j] * torsion.values()[j] / 3.0;
        let chain = -f3.values()[j]
            * (d.df1.values()[j] / s.f1().values()[j] + d.df2.values()[j] / s.f2().values()[j]);
        worst = worst.max((closed - chain).abs());
    }
    worst
}

/// Explicit diffusion limit dt = safety·(min V)²·Δx²/2 for the 1/V²
/// diffusion coefficient.
pub fn cfl_dt(s: &TripleState, cfl_safety: f64) -> f64 {
    let dx = TAU / s.grid_size() as f64;
    let min_v = s.v().min();
    cfl_safety * min_v * min_v * dx * dx / 2.0
}

fn check_admissible(name: &'static str, f: &PeriodicField) -> Result<(), StepRejected> {
    for (point, &value) in f.values().iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(StepRejected { field: name, point, value });
        }
    }
    Ok(())
}

/// One classical RK4 step. Rejects (instead of clipping) any step whose
/// output leaves the positive cone; the caller retries with dt/2.
pub fn step(s: &TripleState, dt: f64) -> Result<TripleState, StepRejected> {
    assert!(dt > 0.0, "step size must be positive");
    let n = s.grid_size();
    let advance = |base: &TripleState, d: &Derivs, h: f64| {
        let lift = |f: &PeriodicField, df: &PeriodicField| {
            PeriodicField::from_values_unchecked(
                (0..n).map(|j| f.values()[j] + h * df.values()[j]).collect(),
            )
        };
        TripleState::new_unchecked(
            lift(base.f1(), &d.df1),
            lift(base.f2(), &d.df2),
            lift(base.v(), &d.dv),
            base.t() + h,
        )
    };

    let k1 = rhs(s);
    let k2 = rhs(&advance(s, &k1, dt / 2.0));
    let k3 = rhs(&advance(s, &k2, dt / 2.0));
    let k4 = rhs(&advance(s, &k3, dt));

    let combine = |f: &PeriodicField, a: &PeriodicField, b: &PeriodicField, c: &PeriodicField, d: &PeriodicField| {
        PeriodicField::from_values_unchecked(
            (0..n)
                .map(|j| {
                    f.values()[j]
                        + dt / 6.0
                            * (a.values()[j]
                                + 2.0 * b.values()[j]
                                + 2.0 * c.values()[j]
                                + d.values()[j])
                })
                .collect(),
        )
    };
    let f1 = combine(s.f1(), &k1.df1, &k2.df1, &k3.df1, &k4.df1);
    let f2 = combine(s.f2(), &k1.df2, &k2.df2, &k3.df2, &k4.df2);
    let v = combine(s.v(), &k1.dv, &k2.dv, &k3.dv, &k4.dv);
    check_admissible("f1", &f1)?;
    check_admissible("f2", &f2)?;
    check_admissible("V", &v)?;
    Ok(TripleState::new_unchecked(f1, f2, v, s.t() + dt))
}

const MAX_HALVINGS: u32 = 10;

/// Step with the reject-and-halve contract; hard failure after
/// [`MAX_HALVINGS`] consecutive halvings, which signals definiteness loss.
fn advance_with_halving(state: &TripleState, dt0: f64) -> Result<(TripleState, u32), FlowError> {
    let mut dt = dt0;
    let mut halvings = 0;
    loop {
        match step(state, dt) {
            Ok(next) => return Ok((next, halvings)),
            Err(reject) => {
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(FlowError::PositivityLoss {
                        t: state.t(),
                        reason: reject.to_string(),
                        halvings: halvings - 1,
                        dt0,
                        last_state: Box::new(state.clone()),
                    });
                }
                dt *= 0.5;
            }
        }
    }
}

/// The decaying a-priori bound 𝒯₀/(1 + 𝒯₀t/3) on max 𝒯.
pub fn torsion_decay_bound(initial_max: f64, t: f64) -> f64 {
    initial_max / (1.0 + initial_max * t / 3.0)
}

/// A full field snapshot, together with the trapezoid-accumulated
/// time integral ∫₀ᵗ K ds of K = 𝒯V² up to the snapshot time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub state: TripleState,
    pub k_time_integral: PeriodicField,
}

/// Worst per-step violations of the discretely monotone quantities.
/// All should be at roundoff; positive values measure the violation.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepMonotonicity {
    pub worst_max_t_increase: f64,
    pub worst_min_v_decrease: f64,
    pub worst_meridian_decrease: f64,
    pub worst_max_f_increase: f64,
}

/// Scalar monitor series (one entry per monitor time) plus snapshots.
#[derive(Debug, Clone, Default)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub dt: Vec<f64>,
    pub max_t: Vec<f64>,
    pub decay_bound: Vec<f64>,
    pub min_v: Vec<f64>,
    pub max_v: Vec<f64>,
    pub meridian_length: Vec<f64>,
    pub total_volume: Vec<f64>,
    pub min_f: Vec<f64>,
    pub max_f: Vec<f64>,
    pub eqn_a_residual: Vec<f64>,
    pub v2_residual: Vec<f64>,
    pub dist_to_standard: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub step_monotonicity: StepMonotonicity,
    pub steps: usize,
    /// False when max_steps ran out before t_end.
    pub completed: bool,
    pub warnings: Vec<String>,
}

impl TrajectoryRecord {
    pub fn monitor_len(&self) -> usize {
        self.times.len()
    }

    pub fn final_state(&self) -> &TripleState {
        &self.snapshots.last().expect("run always snapshots").state
    }
}

/// Accumulates ∫₀ᵗ K ds (K = 𝒯V², pointwise) by the trapezoid rule over
/// the recorded event times, and carries the reference V²(·, 0).
struct V2Ledger {
    v0_squared: Vec<f64>,
    accumulated: PeriodicField,
    last_t: f64,
    last_k: PeriodicField,
}

impl V2Ledger {
    fn new(state: &TripleState, torsion: &PeriodicField) -> Self {
        Self {
            v0_squared: state.v().values().iter().map(|v| v * v).collect(),
            accumulated: PeriodicField::constant(state.grid_size(), 0.0).expect("valid grid"),
            last_t: state.t(),
            last_k: k_field(state, torsion),
        }
    }

    fn advance_to(&mut self, state: &TripleState, torsion: &PeriodicField) {
        let t = state.t();
        if t <= self.last_t {
            return;
        }
        let k_now = k_field(state, torsion);
        let h = t - self.last_t;
        self.accumulated = PeriodicField::from_values_unchecked(
            (0..k_now.len())
                .map(|j| {
                    self.accumulated.values()[j]
                        + 0.5 * h * (self.last_k.values()[j] + k_now.values()[j])
                })
                .collect(),
        );
        self.last_t = t;
        self.last_k = k_now;
    }

    fn residual(&self, state: &TripleState) -> f64 {
        let mut worst = 0.0f64;
        for (j, &v) in state.v().values().iter().enumerate() {
            let predicted = self.v0_squared[j] + (2.0 / 3.0) * self.accumulated.values()[j];
            worst = worst.max((v * v - predicted).abs());
        }
        worst
    }
}

fn k_field(state: &TripleState, torsion: &PeriodicField) -> PeriodicField {
    torsion.zip_with(state.v(), |t, v| t * v * v)
}

/// Integrate from the given initial data to `t_end`, recording monitor
/// rows every `monitor_every` and snapshots every `snapshot_every`
/// (both always fire at t = 0 and at the final time). The adaptive dt is
/// the CFL limit clamped so steps land exactly on event boundaries.
pub fn run(data: &InitialData, cfg: &FlowConfig) -> Result<TrajectoryRecord, FlowError> {
    cfg.validate()?;
    let mut state = geometry::from_potentials(data)?;
    let mut record = TrajectoryRecord {
        completed: true,
        ..TrajectoryRecord::default()
    };

    let a0 = state.a_fields();
    for (i, a) in a0.iter().enumerate() {
        let min = a.min();
        if min < 1e-6 {
            record.warnings.push(format!(
                "A{} comes within {min:.3e} of zero: near-degenerate data, dt will shrink accordingly",
                i + 1
            ));
        }
    }

    let torsion0 = geometry::torsion_quantity(&state);
    let initial_max_t = torsion0.max();
    let mut ledger = V2Ledger::new(&state, &torsion0);

    let t_end = cfg.t_end;
    let mut monitor_k: u64 = 0;
    let mut snapshot_k: u64 = 0;
    let mut prev = StepScalars::measure(&state, &torsion0);

    let planned = plan_dt(&state, cfg, monitor_k, snapshot_k);
    push_monitor_row(&mut record, &state, &torsion0, planned.dt, initial_max_t, &ledger);
    record.snapshots.push(Snapshot {
        t: state.t(),
        state: state.clone(),
        k_time_integral: ledger.accumulated.clone(),
    });

    const EPS: f64 = 1e-12;
    while state.t() < t_end - EPS {
        if record.steps >= cfg.max_steps {
            record.completed = false;
            break;
        }
        let planned = plan_dt(&state, cfg, monitor_k, snapshot_k);
        let (mut next, halvings) = advance_with_halving(&state, planned.dt)?;
        if halvings == 0 {
            if let Some(target) = planned.lands_on {
                next = next.with_time(target);
            }
        }
        record.steps += 1;
        state = next;

        let torsion = geometry::torsion_quantity(&state);
        let now = StepScalars::measure(&state, &torsion);
        let mono = &mut record.step_monotonicity;
        mono.worst_max_t_increase = mono.worst_max_t_increase.max(now.max_t - prev.max_t);
        mono.worst_min_v_decrease = mono.worst_min_v_decrease.max(prev.min_v - now.min_v);
        mono.worst_meridian_decrease = mono
            .worst_meridian_decrease
            .max(prev.meridian - now.meridian);
        mono.worst_max_f_increase = mono.worst_max_f_increase.max(now.max_f - prev.max_f);
        prev = now;

        let t = state.t();
        let monitor_due = fire_events(&mut monitor_k, cfg.monitor_every, t, EPS);
        let snapshot_due = fire_events(&mut snapshot_k, cfg.snapshot_every, t, EPS);
        let at_end = t >= t_end - EPS;
        if monitor_due || snapshot_due || at_end {
            ledger.advance_to(&state, &torsion);
        }
        if monitor_due || at_end {
            push_monitor_row(&mut record, &state, &torsion, planned.dt, initial_max_t, &ledger);
        }
        if snapshot_due || at_end {
            record.snapshots.push(Snapshot {
                t,
                state: state.clone(),
                k_time_integral: ledger.accumulated.clone(),
            });
        }
        if at_end {
            break;
        }
    }

    if !record.completed {
        // Partial record: still close with a final row and snapshot,
        // unless events already fired at exactly this time.
        let torsion = geometry::torsion_quantity(&state);
        ledger.advance_to(&state, &torsion);
        if record.times.last() != Some(&state.t()) {
            push_monitor_row(&mut record, &state, &torsion, 0.0, initial_max_t, &ledger);
        }
        if record.snapshots.last().map(|s| s.t) != Some(state.t()) {
            record.snapshots.push(Snapshot {
                t: state.t(),
                state,
                k_time_integral: ledger.accumulated.clone(),
            });
        }
    }
    Ok(record)
}

struct PlannedStep {
    dt: f64,
    /// Event boundary this step is clamped to, if any.
    lands_on: Option<f64>,
}

fn plan_dt(state: &TripleState, cfg: &FlowConfig, monitor_k: u64, snapshot_k: u64) -> PlannedStep {
    let t = state.t();
    let mut dt = cfl_dt(state, cfg.cfl_safety);
    let mut lands_on = None;
    let mut clamp = |boundary: f64| {
        if boundary > t && boundary - t <= dt {
            dt = boundary - t;
            lands_on = Some(boundary);
        }
    };
    clamp(cfg.t_end);
    clamp((monitor_k + 1) as f64 * cfg.monitor_every);
    clamp((snapshot_k + 1) as f64 * cfg.snapshot_every);
    PlannedStep { dt, lands_on }
}

/// Advance the event counter past every multiple reached by time `t`;
/// true when at least one boundary fired.
fn fire_events(k: &mut u64, every: f64, t: f64, eps: f64) -> bool {
    let mut fired = false;
    while (*k + 1) as f64 * every <= t + eps {
        *k += 1;
        fired = true;
    }
    fired
}

struct StepScalars {
    max_t: f64,
    min_v: f64,
    meridian: f64,
    max_f: f64,
}

impl StepScalars {
    fn measure(state: &TripleState, torsion: &PeriodicField) -> Self {
        Self {
            max_t: torsion.max(),
            min_v: state.v().min(),
            meridian: state.v().integrate(),
            max_f: state.max_f(),
        }
    }
}

fn push_monitor_row(
    record: &mut TrajectoryRecord,
    state: &TripleState,
    torsion: &PeriodicField,
    dt: f64,
    initial_max_t: f64,
    ledger: &V2Ledger,
) {
    let t = state.t();
    debug_assert!(record.times.last().is_none_or(|&last| t > last));
    let meridian = state.v().integrate();
    record.times.push(t);
    record.dt.push(dt);
    record.max_t.push(torsion.max());
    record.decay_bound.push(torsion_decay_bound(initial_max_t, t));
    record.min_v.push(state.v().min());
    record.max_v.push(state.v().max());
    record.meridian_length.push(meridian);
    record.total_volume.push(TAU.powi(3) * meridian);
    record.min_f.push(state.min_f());
    record.max_f.push(state.max_f());
    record.eqn_a_residual.push(eqn_a_residual(state));
    record.v2_residual.push(ledger.residual(state));
    record
        .dist_to_standard
        .push(gauge::pull_back(state).dist_to_standard());
}

/// Max pointwise discrepancy, over snapshots, between V²(·, t) and
/// V²(·, 0) + (2/3)∫₀ᵗ K ds with K accumulated at the recorded cadence.
pub fn v2_integral_residual(record: &TrajectoryRecord) -> f64 {
    let Some(first) = record.snapshots.first() else {
        return 0.0;
    };
    let v0_sq: Vec<f64> = first.state.v().values().iter().map(|v| v * v).collect();
    let mut worst = 0.0f64;
    for snap in &record.snapshots {
        for (j, &v) in snap.state.v().values().iter().enumerate() {
            let predicted = v0_sq[j] + (2.0 / 3.0) * snap.k_time_integral.values()[j];
            worst = worst.max((v * v - predicted).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FourierMode, InitialData};

    fn cosine_data(n: usize, amp: f64) -> InitialData {
        InitialData::flat(n).with_mode(0, FourierMode::cosine(1, amp))
    }

    fn cosine_state(n: usize, amp: f64) -> TripleState {
        geometry::from_potentials(&cosine_data(n, amp)).unwrap()
    }

    #[test]
    fn flat_state_is_stationary() {
        let s = geometry::from_potentials(&InitialData::flat(64)).unwrap();
        let d = rhs(&s);
        assert!(d.df1.max_abs() < 1e-15);
        assert!(d.df2.max_abs() < 1e-15);
        assert!(d.dv.max_abs() < 1e-15);
    }

    #[test]
    fn a_dot_integrals_vanish() {
        // Perfect-derivative structure: ∫∂ₜAᵢ dx₀ = 0 to roundoff.
        let s = cosine_state(64, 0.1);
        let adot = a_dot(&s, &rhs(&s));
        for a in &adot {
            assert!(a.integrate().abs() < 1e-12);
        }
    }

    #[test]
    fn dv_is_nonnegative() {
        let s = cosine_state(64, 0.3);
        assert!(rhs(&s).dv.min() >= 0.0);
    }

    #[test]
    fn f3_consistency_flat_and_small() {
        let flat = geometry::from_potentials(&InitialData::flat(64)).unwrap();
        assert!(rhs_f3_consistency(&flat) < 1e-15);
        assert!(rhs_f3_consistency(&cosine_state(64, 0.1)) < 1e-10);
    }

    #[test]
    fn f3_consistency_band_limited() {
        let data = InitialData::flat(64)
            .with_mode(0, FourierMode::cosine(2, 0.04))
            .with_mode(1, FourierMode {
                wavenumber: 1,
                cos_amp: 0.05,
                sin_amp: 0.08,
            })
            .with_mode(2, FourierMode::cosine(3, 0.01));
        let s = geometry::from_potentials(&data).unwrap();
        assert!(rhs_f3_consistency(&s) < 1e-8);
    }

    #[test]
    fn cfl_formula() {
        let s = geometry::from_potentials(&InitialData::flat(64)).unwrap();
        let expected = 0.25 * (TAU / 64.0) * (TAU / 64.0) / 2.0;
        assert!((cfl_dt(&s, 0.25) - expected).abs() < 1e-15);
        assert!(cfl_dt(&s, 0.25) > 0.0);
    }

    #[test]
    fn cfl_scales_with_min_v_squared() {
        let one = PeriodicField::constant(32, 1.0).unwrap();
        let half = PeriodicField::constant(32, 0.5).unwrap();
        let a = TripleState::new(one.clone(), one.clone(), one.clone(), 0.0).unwrap();
        let b = TripleState::new(one.clone(), one, half, 0.0).unwrap();
        let ratio = cfl_dt(&b, 0.25) / cfl_dt(&a, 0.25);
        assert!((ratio - 0.25).abs() < 1e-14);
    }

    #[test]
    fn flat_state_is_discrete_fixed_point() {
        let s = geometry::from_potentials(&InitialData::flat(64)).unwrap();
        let next = step(&s, 0.1).unwrap();
        for j in 0..64 {
            assert!((next.f1().values()[j] - 1.0).abs() < 1e-15);
            assert!((next.f2().values()[j] - 1.0).abs() < 1e-15);
            assert!((next.v().values()[j] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn step_preserves_a_integrals() {
        let s = cosine_state(64, 0.1);
        let next = step(&s, 1e-3).unwrap();
        for a in next.a_fields() {
            assert!((a.integrate() - TAU).abs() < 1e-11);
        }
    }

    #[test]
    fn step_rejects_positivity_violation() {
        // A tiny V makes the diffusion term enormous; a large dt then
        // drives f negative and the step must be rejected, not clipped.
        let f1 = PeriodicField::from_fn(64, |x| 1.0 + 0.5 * x.cos()).unwrap();
        let f2 = PeriodicField::constant(64, 1.0).unwrap();
        let v = PeriodicField::constant(64, 1e-4).unwrap();
        let s = TripleState::new(f1, f2, v, 0.0).unwrap();
        assert!(step(&s, 1.0).is_err());
    }

    #[test]
    fn halving_gives_up_after_ten_tries() {
        let f1 = PeriodicField::from_fn(64, |x| 1.0 + 0.5 * x.cos()).unwrap();
        let f2 = PeriodicField::constant(64, 1.0).unwrap();
        let v = PeriodicField::constant(64, 1e-4).unwrap();
        let s = TripleState::new(f1, f2, v, 0.0).unwrap();
        match advance_with_halving(&s, 1e4) {
            Err(FlowError::PositivityLoss { halvings, .. }) => assert_eq!(halvings, MAX_HALVINGS),
            other => panic!("expected positivity loss, got {other:?}"),
        }
    }

    #[test]
    fn flat_run_monitors_are_constant() {
        let cfg = FlowConfig {
            t_end: 1.0,
            cfl_safety: 0.25,
            max_steps: 10_000,
            snapshot_every: 0.5,
            monitor_every: 0.1,
        };
        let record = run(&InitialData::flat(64), &cfg).unwrap();
        assert!(record.completed);
        assert_eq!(record.monitor_len(), 11);
        for i in 0..record.monitor_len() {
            assert!(record.max_t[i] < 1e-15);
            assert!((record.meridian_length[i] - TAU).abs() < 1e-13);
            assert!(record.v2_residual[i] < 1e-15);
            assert!(record.dist_to_standard[i] < 1e-13);
        }
    }

    #[test]
    fn monitor_rows_land_on_exact_multiples() {
        let cfg = FlowConfig {
            t_end: 0.5,
            cfl_safety: 0.25,
            max_steps: 10_000,
            snapshot_every: 0.25,
            monitor_every: 0.05,
        };
        let record = run(&cosine_data(64, 0.1), &cfg).unwrap();
        assert_eq!(record.monitor_len(), 11);
        for (i, &t) in record.times.iter().enumerate() {
            assert_eq!(t, i as f64 * 0.05);
        }
        assert_eq!(record.snapshots.len(), 3);
    }

    #[test]
    fn short_run_invariants() {
        let cfg = FlowConfig {
            t_end: 1.0,
            cfl_safety: 0.25,
            max_steps: 100_000,
            snapshot_every: 0.5,
            monitor_every: 0.05,
        };
        let record = run(&cosine_data(64, 0.1), &cfg).unwrap();
        assert!(record.completed);
        let mono = record.step_monotonicity;
        assert!(mono.worst_max_t_increase <= 1e-10);
        assert!(mono.worst_min_v_decrease <= 1e-12);
        assert!(mono.worst_meridian_decrease <= 1e-12);
        assert!(mono.worst_max_f_increase <= 1e-10);
        for snap in &record.snapshots {
            for a in snap.state.a_fields() {
                assert!((a.integrate() - TAU).abs() < 1e-9);
            }
            assert!(rhs_f3_consistency(&snap.state) < 1e-8);
        }
        for w in record.meridian_length.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        assert!(*record.meridian_length.last().unwrap() <= TAU + 1e-9);
        for i in 0..record.monitor_len() {
            assert!(record.eqn_a_residual[i] < 1e-9);
            assert!(record.max_t[i] <= record.decay_bound[i] + 1e-9);
        }
    }

    #[test]
    fn eqn_a_residual_small_state() {
        assert!(eqn_a_residual(&cosine_state(64, 0.1)) < 1e-9);
        let flat = geometry::from_potentials(&InitialData::flat(64)).unwrap();
        assert!(eqn_a_residual(&flat) < 1e-15);
    }

    #[test]
    fn v2_residual_small_with_per_step_monitoring() {
        let data = cosine_data(64, 0.1);
        let s0 = geometry::from_potentials(&data).unwrap();
        let dt = cfl_dt(&s0, 0.25);
        let cfg = FlowConfig {
            t_end: 0.5,
            cfl_safety: 0.25,
            max_steps: 100_000,
            snapshot_every: 0.25,
            monitor_every: dt,
        };
        let record = run(&data, &cfg).unwrap();
        assert!(v2_integral_residual(&record) < 1e-6);
    }

    #[test]
    fn near_degenerate_data_warns_and_runs() {
        // A₁ dips to 5e-7: accepted, but flagged, and the CFL step
        // shrinks with (min V)².
        let data = InitialData::flat(64).with_mode(0, FourierMode::cosine(1, 1.0 - 5e-7));
        let s0 = geometry::from_potentials(&data).unwrap();
        let dt = cfl_dt(&s0, 0.25);
        assert!(dt < 1e-6);
        let cfg = FlowConfig {
            t_end: 20.0 * dt,
            cfl_safety: 0.25,
            max_steps: 1_000,
            snapshot_every: 10.0 * dt,
            monitor_every: 10.0 * dt,
        };
        let record = run(&data, &cfg).unwrap();
        assert!(record.completed);
        assert!(record.warnings.iter().any(|w| w.contains("A1")));
    }

    #[test]
    fn max_steps_flags_incomplete() {
        let cfg = FlowConfig {
            t_end: 10.0,
            cfl_safety: 0.25,
            max_steps: 5,
            snapshot_every: 5.0,
            monitor_every: 1.0,
        };
        let record = run(&cosine_data(64, 0.1), &cfg).unwrap();
        assert!(!record.completed);
        assert_eq!(record.steps, 5);
        assert!(record.snapshots.last().unwrap().t < 10.0);
    }
}
