//! Shared fixtures for the benchmark targets.

use qsir_core::{Params, SirState};

/// Supercritical rates (R0 = 3) on the reference grid.
pub fn outbreak() -> (Params, SirState) {
    (
        Params::new(0.3, 0.1, 1.1, 0.01).unwrap(),
        SirState::new(0.6, 0.4, 0.0).unwrap(),
    )
}

/// Subcritical rates (R0 = 0.5) on the same grid.
pub fn subcritical() -> (Params, SirState) {
    (
        Params::new(0.3, 0.6, 1.1, 0.01).unwrap(),
        SirState::new(0.6, 0.4, 0.0).unwrap(),
    )
}
