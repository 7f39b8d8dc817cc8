//! Library side of the `lindsim` command: config parsing, the simulation
//! pipeline and verification suites.

pub mod config;
pub mod error;
pub mod simulate;
pub mod verify;

/// 17 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
