//! Optimal edge weights for discrete-time quantum consensus on qudit networks.
//!
//! The consensus iteration over `N` qudits splits into independent classical
//! consensus problems, one per integer partition of `N`, each living on the
//! Schreier graph of that partition. This crate builds those graphs, computes
//! their spectra, optimises edge weights for the second largest eigenvalue
//! modulus (SLEM), evaluates the known closed-form optima, and checks all of it
//! against a dense density-matrix simulator.

pub mod combinatorics;
pub mod error;
pub mod exec;
pub mod graphs;
pub mod optimizer;
pub mod quantum;
pub mod scheme;
pub mod schreier;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;

/// Rounds to twelve significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Twelve significant digits with `.` as decimal point; scientific notation
/// outside `[1e-5, 1e15)`.
pub fn fmt_sig(x: f64) -> String {
    let v = round_sig(x);
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-5..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}
