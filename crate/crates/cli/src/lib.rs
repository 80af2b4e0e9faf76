//! Command-line front end for `hutchfrac-core`: JSON configs, attractor
//! runs with CSV/PPM output, contractivity reports, remetrization
//! builds and the self-check suites.

pub mod commands;
pub mod config;
pub mod output;
pub mod reports;
pub mod suites;

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFICATION_FAILURE: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
    pub const NON_CONVERGENCE: i32 = 3;
    pub const REMETRIZE_FAILURE: i32 = 4;
}

/// Resolves the worker-thread request: the `HUTCHFRAC_THREADS`
/// environment variable overrides the flag, and `auto`/absent defers to
/// the runtime. All outputs are deterministic regardless of the value.
pub fn resolve_threads(flag: Option<&str>) -> Option<usize> {
    let raw = std::env::var("HUTCHFRAC_THREADS")
        .ok()
        .or_else(|| flag.map(String::from))?;
    if raw == "auto" {
        return None;
    }
    raw.parse().ok()
}
