//! Command front end: config parsing, run orchestration, sweeps, the
//! identity check suite, and file output. The binary in `src/bin` is a
//! thin dispatcher over [`commands`].

pub mod check;
pub mod commands;
pub mod config;
pub mod output;

/// Process exit codes, stable for scripting.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VERDICT: i32 = 4;

/// Log verbosity from the HSFLOW_LOG environment variable
/// (quiet = 0, info = 1, debug = 2). Defaults to info.
pub fn verbosity() -> u8 {
    match std::env::var("HSFLOW_LOG").as_deref() {
        Ok("quiet") | Ok("0") => 0,
        Ok("debug") | Ok("2") => 2,
        _ => 1,
    }
}

macro_rules! info {
    ($($arg:tt)*) => {
        if $crate::cli::verbosity() >= 1 {
            eprintln!($($arg)*);
        }
    };
}
pub(crate) use info;
