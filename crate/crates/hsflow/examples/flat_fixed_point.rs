//! The flat torus is an exact fixed point of the flow: zero torsion, zero
//! right-hand side, constant monitors.
//!
//! ```bash
//! cargo run --example flat_fixed_point
//! ```

use hsflow::geometry::from_potentials;
use hsflow::{flow, FlowConfig, InitialData};

fn main() {
    let data = InitialData::flat(64);
    let state = from_potentials(&data).unwrap();
    let d = flow::rhs(&state);
    println!(
        "rhs at the flat state: |df1| = {:.3e}, |df2| = {:.3e}, |dV| = {:.3e}",
        d.df1.max_abs(),
        d.df2.max_abs(),
        d.dv.max_abs()
    );

    let cfg = FlowConfig {
        t_end: 5.0,
        cfl_safety: 0.25,
        max_steps: 1_000_000,
        snapshot_every: 1.0,
        monitor_every: 0.5,
    };
    let record = flow::run(&data, &cfg).unwrap();
    println!("integrated {} steps to t = 5", record.steps);
    println!("  t        max_T      meridian_len");
    for i in 0..record.monitor_len() {
        println!(
            "  {:<6} {:.3e}   {:.15}",
            record.times[i], record.max_t[i], record.meridian_length[i]
        );
    }
    let spread = record
        .snapshots
        .iter()
        .flat_map(|s| [s.state.f1(), s.state.f2(), s.state.v()])
        .map(|f| f.max() - f.min())
        .fold(0.0f64, f64::max);
    println!("largest field spread across all snapshots: {spread:.3e}");
}
