//! Deterministic file output: monitor CSV, snapshot and gauge tables,
//! convergence series, verdicts, and the run manifest. Data files carry
//! nothing wall-clock dependent; identical config and build give byte
//! identical CSVs. All numbers are printed with 17 significant digits.

use crate::flow::TrajectoryRecord;
use crate::gauge::{ConvergenceSummary, GaugeFrame};
use crate::geometry::{self, TripleState};
use crate::monitors::EstimateVerdict;
use crate::spectral::grid;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub const MONITOR_COLUMNS: &str = "t,dt,max_T,decay_bound,min_V,max_V,meridian_len,total_volume,min_f,max_f,eqnA_residual,v2_residual,dist_to_standard";

pub fn write_monitors_csv(path: &Path, record: &TrajectoryRecord) -> io::Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "{MONITOR_COLUMNS}")?;
    for i in 0..record.monitor_len() {
        let row = [
            record.times[i],
            record.dt[i],
            record.max_t[i],
            record.decay_bound[i],
            record.min_v[i],
            record.max_v[i],
            record.meridian_length[i],
            record.total_volume[i],
            record.min_f[i],
            record.max_f[i],
            record.eqn_a_residual[i],
            record.v2_residual[i],
            record.dist_to_standard[i],
        ];
        let line: Vec<String> = row.iter().map(|&x| fmt17(x)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

/// Columnar field snapshot keyed by x₀.
pub fn write_snapshot_csv(path: &Path, state: &TripleState) -> io::Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "x0,f1,f2,V,A1,A2,A3,T,R")?;
    let a = state.a_fields();
    let torsion = geometry::torsion_quantity(state);
    let scalar = geometry::curvature(state).scalar;
    for (j, x) in grid(state.grid_size()).into_iter().enumerate() {
        let row = [
            x,
            state.f1().values()[j],
            state.f2().values()[j],
            state.v().values()[j],
            a[0].values()[j],
            a[1].values()[j],
            a[2].values()[j],
            torsion.values()[j],
            scalar.values()[j],
        ];
        let line: Vec<String> = row.iter().map(|&x| fmt17(x)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

/// Gauge frame table: the map samples G(θ) on the x-grid and the
/// pulled-back warpings f̂ᵢ(θ) on the y-grid share the abscissa column.
pub fn write_gauge_csv(path: &Path, frame: &GaugeFrame) -> io::Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "theta,g_map,fhat1,fhat2,fhat3")?;
    let n = frame.f_hat[0].len();
    for (j, theta) in grid(n).into_iter().enumerate() {
        let row = [
            theta,
            frame.g_map[j],
            frame.f_hat[0].values()[j],
            frame.f_hat[1].values()[j],
            frame.f_hat[2].values()[j],
        ];
        let line: Vec<String> = row.iter().map(|&x| fmt17(x)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub fn write_convergence_csv(path: &Path, summary: &ConvergenceSummary) -> io::Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "t,vt,dist_to_standard,c_times_v_1,c_times_v_2,c_times_v_3")?;
    for r in &summary.records {
        let row = [
            r.t,
            r.vt,
            r.dist_to_standard,
            r.c_times_v[0],
            r.c_times_v[1],
            r.c_times_v[2],
        ];
        let line: Vec<String> = row.iter().map(|&x| fmt17(x)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub fn write_verdicts_csv(path: &Path, verdicts: &[EstimateVerdict]) -> io::Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "name,passed,worst_margin,at_time,tolerance")?;
    for v in verdicts {
        writeln!(
            w,
            "{},{},{},{},{}",
            v.name,
            v.passed,
            fmt17(v.worst_margin),
            fmt17(v.at_time),
            fmt17(v.tolerance)
        )?;
    }
    w.flush()
}

pub fn sha256_hex(path: &Path) -> io::Result<String> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Run provenance: config echo, sizes, timing, verdict summary, and the
/// inventory of produced files with content digests. The wall time is the
/// one intentionally non-reproducible field; the data files it points at
/// are byte-deterministic.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub grid_size: usize,
    pub steps: usize,
    pub completed: bool,
    pub monitor_rows: usize,
    pub snapshot_count: usize,
    pub wall_time_seconds: f64,
    pub verdicts_passed: bool,
    pub verdict_names_failed: Vec<String>,
    pub warnings: Vec<String>,
    pub config: super::config::RunConfig,
    pub files: Vec<FileDigest>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> io::Result<()> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| io::Error::other(e.to_string()))?;
        std::fs::write(path, text)
    }
}
