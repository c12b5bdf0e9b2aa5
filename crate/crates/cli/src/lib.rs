//! File formats, reports and the command line for `gmre-core`.

pub mod checks;
pub mod commands;
pub mod format;
pub mod manifest;
pub mod state_file;

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT_ERROR: i32 = 1;
    pub const NOT_CONVERGED: i32 = 2;
    pub const PROPERTY_FAILURE: i32 = 3;
    pub const USAGE: i32 = 64;
}

/// Applies the `GMRE_THREADS` worker cap to the global thread pool. Later
/// calls have no effect.
pub fn configure_threads() {
    let Some(n) = std::env::var("GMRE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    else {
        return;
    };
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}
