//! The a-priori estimate verdicts: torsion decay, volume bounds,
//! quasi-isometry, and conservation, each with its measured worst margin.
//! Also shows a verdict failing on deliberately tampered data.
//!
//! ```bash
//! cargo run --example estimate_monitors
//! ```

use hsflow::geometry::FourierMode;
use hsflow::monitors::{self, Tolerances};
use hsflow::{flow, FlowConfig, InitialData};

fn main() {
    let data = InitialData::flat(64)
        .with_mode(0, FourierMode::cosine(1, 0.15))
        .with_mode(1, FourierMode::cosine(2, 0.02));
    let cfg = FlowConfig {
        t_end: 4.0,
        cfl_safety: 0.25,
        max_steps: 10_000_000,
        snapshot_every: 1.0,
        monitor_every: 0.05,
    };
    let record = flow::run(&data, &cfg).unwrap();

    println!("verdicts on an honest run:");
    for v in monitors::check_all(&record, &Tolerances::default()) {
        println!(
            "  {:<16} {}  worst margin {:+.3e} at t = {} (tol {:.0e})",
            v.name,
            if v.passed { "PASS" } else { "FAIL" },
            v.worst_margin,
            v.at_time,
            v.tolerance
        );
    }

    println!("\nper-step monotonicity (worst violations, should be ~0):");
    let m = record.step_monotonicity;
    println!("  max T increase:    {:.3e}", m.worst_max_t_increase);
    println!("  min V decrease:    {:.3e}", m.worst_min_v_decrease);
    println!("  meridian decrease: {:.3e}", m.worst_meridian_decrease);
    println!("  max f increase:    {:.3e}", m.worst_max_f_increase);

    // Tamper with the record: freeze max T at its initial value. The
    // decay bound drops below it and the verdict must fail.
    let mut tampered = record.clone();
    let t0 = tampered.max_t[0];
    for v in tampered.max_t.iter_mut() {
        *v = t0;
    }
    let verdict = monitors::check_decay(&tampered, 1e-6);
    println!(
        "\ntampered constant-torsion series: {} (margin {:+.3e} at t = {})",
        if verdict.passed { "PASS" } else { "FAIL" },
        verdict.worst_margin,
        verdict.at_time
    );
}
