//! The three commands: `run`, `check`, `sweep`. Each returns a process
//! exit code (0 pass, 2 config error, 3 numerical failure, 4 verdict
//! failure) so the binary stays a thin dispatcher.

use super::config::{RunConfig, SweepConfig};
use super::output::{self, FileDigest, RunManifest};
use super::{info, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_VERDICT};
use crate::flow::{self, FlowError, TrajectoryRecord};
use crate::gauge;
use crate::monitors;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Execute one configured run, writing monitors, snapshots, gauge frames,
/// convergence series, verdicts, and the manifest into `out_dir`.
pub fn cmd_run(config_path: &Path, out_dir: &Path) -> i32 {
    let cfg = match RunConfig::load(config_path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = std::fs::create_dir_all(out_dir) {
        eprintln!("cannot create {}: {e}", out_dir.display());
        return EXIT_NUMERICAL;
    }
    let data = cfg.initial_data();
    // Surface indefinite data as a config error before starting the clock.
    if let Err(e) = crate::geometry::from_potentials(&data) {
        eprintln!("config error: {e}");
        return EXIT_CONFIG;
    }

    let started = Instant::now();
    let record = match flow::run(&data, &cfg.flow_config()) {
        Ok(record) => record,
        Err(FlowError::PositivityLoss {
            t,
            reason,
            last_state,
            ..
        }) => {
            eprintln!("numerical failure at t = {t:.6e}: {reason}");
            let dump = out_dir.join("last_state.csv");
            if output::write_snapshot_csv(&dump, &last_state).is_ok() {
                eprintln!("last good state dumped to {}", dump.display());
            }
            return EXIT_NUMERICAL;
        }
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let wall = started.elapsed().as_secs_f64();
    for w in &record.warnings {
        eprintln!("warning: {w}");
    }

    let verdicts = monitors::check_all(&record, &cfg.monitor_tolerances());
    match write_outputs(out_dir, &cfg, &record, &verdicts, wall) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("output error: {e}");
            return EXIT_NUMERICAL;
        }
    }

    let all_passed = verdicts.iter().all(|v| v.passed);
    info!(
        "run: {} steps to t = {}, {} monitor rows, {} snapshots, {:.2}s",
        record.steps,
        record.times.last().copied().unwrap_or(0.0),
        record.monitor_len(),
        record.snapshots.len(),
        wall
    );
    for v in &verdicts {
        println!(
            "verdict {:<16} {} worst_margin={} at t={}",
            v.name,
            if v.passed { "PASS" } else { "FAIL" },
            output::fmt17(v.worst_margin),
            output::fmt17(v.at_time),
        );
    }
    if !record.completed {
        eprintln!("warning: max_steps reached before t_end; record flagged incomplete");
    }
    if all_passed && record.completed {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

fn write_outputs(
    out_dir: &Path,
    cfg: &RunConfig,
    record: &TrajectoryRecord,
    verdicts: &[monitors::EstimateVerdict],
    wall: f64,
) -> io::Result<()> {
    let mut files: Vec<PathBuf> = Vec::new();
    let monitors_path = out_dir.join("monitors.csv");
    output::write_monitors_csv(&monitors_path, record)?;
    files.push(monitors_path);

    for (i, snap) in record.snapshots.iter().enumerate() {
        let snap_path = out_dir.join(format!("snapshot_{i:04}.csv"));
        output::write_snapshot_csv(&snap_path, &snap.state)?;
        files.push(snap_path);
        let gauge_path = out_dir.join(format!("gauge_{i:04}.csv"));
        output::write_gauge_csv(&gauge_path, &gauge::pull_back(&snap.state))?;
        files.push(gauge_path);
    }

    let summary = gauge::convergence_metrics(record);
    let conv_path = out_dir.join("convergence.csv");
    output::write_convergence_csv(&conv_path, &summary)?;
    files.push(conv_path);

    let verdicts_path = out_dir.join("verdicts.csv");
    output::write_verdicts_csv(&verdicts_path, verdicts)?;
    files.push(verdicts_path);

    let mut digests = Vec::new();
    for path in &files {
        digests.push(FileDigest {
            path: path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: output::sha256_hex(path)?,
        });
    }
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        grid_size: cfg.grid.n,
        steps: record.steps,
        completed: record.completed,
        monitor_rows: record.monitor_len(),
        snapshot_count: record.snapshots.len(),
        wall_time_seconds: wall,
        verdicts_passed: verdicts.iter().all(|v| v.passed),
        verdict_names_failed: verdicts
            .iter()
            .filter(|v| !v.passed)
            .map(|v| v.name.to_string())
            .collect(),
        warnings: record.warnings.clone(),
        config: cfg.clone(),
        files: digests,
    };
    manifest.write(&out_dir.join("manifest.toml"))
}

/// Run the identity suite at the given grid sizes (default 32 and 64) and
/// print measured errors against tolerances.
pub fn cmd_check(grids: &[usize]) -> i32 {
    let mut all_passed = true;
    println!(
        "{:<28} {:>5} {:>24} {:>9} {:>6}",
        "check", "N", "measured", "tol", "status"
    );
    for &n in grids {
        for row in super::check::suite(n) {
            let ok = row.passed();
            all_passed &= ok;
            println!(
                "{:<28} {:>5} {:>24} {:>9.0e} {:>6}",
                row.name,
                row.grid,
                output::fmt17(row.measured),
                row.tolerance,
                if ok { "PASS" } else { "FAIL" }
            );
        }
    }
    // Spectral decay of the eqnA residual from the smallest grid upward.
    let base = grids.iter().copied().min().unwrap_or(32);
    let (coarse, fine) = super::check::spectral_decay(base);
    let ratio = coarse / fine.max(f64::MIN_POSITIVE);
    let decay_ok = ratio > 16.0;
    all_passed &= decay_ok;
    println!(
        "eqnA-residual decay N={} -> N={}: {} -> {} (ratio {:.3e}, need > 16) {}",
        base,
        2 * base,
        output::fmt17(coarse),
        output::fmt17(fine),
        ratio,
        if decay_ok { "PASS" } else { "FAIL" }
    );
    if all_passed {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

struct CaseOutcome {
    mode: u32,
    amplitude: f64,
    status: &'static str,
    final_max_t: f64,
    final_dist: f64,
    decay_margin: f64,
    verdicts_passed: bool,
}

/// Run every sweep case (in parallel, isolated output directories) and
/// aggregate the endpoints into summary.csv.
pub fn cmd_sweep(config_path: &Path, out_dir: &Path) -> i32 {
    let sweep = match SweepConfig::load(config_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = std::fs::create_dir_all(out_dir) {
        eprintln!("cannot create {}: {e}", out_dir.display());
        return EXIT_NUMERICAL;
    }
    let cases = sweep.cases();
    let threads = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(cases.len().max(1));

    let mut outcomes: Vec<Option<CaseOutcome>> = Vec::new();
    outcomes.resize_with(cases.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let (tx, rx) = std::sync::mpsc::channel::<(usize, CaseOutcome)>();

    std::thread::scope(|scope| {
        let cases = &cases;
        let next = &next;
        for _ in 0..threads {
            let tx = tx.clone();
            scope.spawn(move || loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if idx >= cases.len() {
                    break;
                }
                let (mode, amplitude, cfg) = &cases[idx];
                let case_dir = out_dir.join(format!("case_{idx:03}"));
                let outcome = run_case(*mode, *amplitude, cfg, &case_dir);
                info!(
                    "sweep case {idx}: mode {} amplitude {} -> {}",
                    mode, amplitude, outcome.status
                );
                let _ = tx.send((idx, outcome));
            });
        }
        drop(tx);
        for (idx, outcome) in rx {
            outcomes[idx] = Some(outcome);
        }
    });

    let summary_path = out_dir.join("summary.csv");
    let mut failed_config = false;
    let mut failed_numerical = false;
    let write_result = (|| -> io::Result<()> {
        use std::io::Write;
        let mut w = std::io::BufWriter::new(std::fs::File::create(&summary_path)?);
        writeln!(
            w,
            "case,mode,amplitude,status,final_max_T,final_dist_to_standard,decay_margin,verdicts_passed"
        )?;
        for (idx, outcome) in outcomes.iter().enumerate() {
            let o = outcome.as_ref().expect("all cases ran");
            match o.status {
                "ok" => {}
                "definiteness" => failed_config = true,
                _ => failed_numerical = true,
            }
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                idx,
                o.mode,
                output::fmt17(o.amplitude),
                o.status,
                output::fmt17(o.final_max_t),
                output::fmt17(o.final_dist),
                output::fmt17(o.decay_margin),
                o.verdicts_passed
            )?;
        }
        w.flush()
    })();
    if let Err(e) = write_result {
        eprintln!("output error: {e}");
        return EXIT_NUMERICAL;
    }
    info!("sweep: {} cases, summary at {}", cases.len(), summary_path.display());
    if failed_numerical {
        EXIT_NUMERICAL
    } else if failed_config {
        EXIT_CONFIG
    } else {
        EXIT_OK
    }
}

fn run_case(mode: u32, amplitude: f64, cfg: &RunConfig, case_dir: &Path) -> CaseOutcome {
    let failed = |status: &'static str| CaseOutcome {
        mode,
        amplitude,
        status,
        final_max_t: f64::NAN,
        final_dist: f64::NAN,
        decay_margin: f64::NAN,
        verdicts_passed: false,
    };
    if std::fs::create_dir_all(case_dir).is_err() {
        return failed("io");
    }
    let data = cfg.initial_data();
    if crate::geometry::from_potentials(&data).is_err() {
        return failed("definiteness");
    }
    let record = match flow::run(&data, &cfg.flow_config()) {
        Ok(record) if record.completed => record,
        Ok(_) => return failed("incomplete"),
        Err(_) => return failed("numerical"),
    };
    let verdicts = monitors::check_all(&record, &cfg.monitor_tolerances());
    let wall = 0.0; // per-case wall time is not tracked inside sweeps
    if write_outputs(case_dir, cfg, &record, &verdicts, wall).is_err() {
        return failed("io");
    }
    let decay = monitors::check_decay(&record, cfg.tolerances.decay);
    CaseOutcome {
        mode,
        amplitude,
        status: "ok",
        final_max_t: record.max_t.last().copied().unwrap_or(f64::NAN),
        final_dist: record.dist_to_standard.last().copied().unwrap_or(f64::NAN),
        decay_margin: decay.worst_margin,
        verdicts_passed: verdicts.iter().all(|v| v.passed),
    }
}
