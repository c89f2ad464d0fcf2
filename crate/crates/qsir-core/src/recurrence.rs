//! Step-by-step evolution of the quantum SIR system on the geometric grid.
//!
//! One step advances the state from time t to qt:
//!
//! ```text
//! x(qt) = x (x + y) / (x + y(1 + b(q-1)t))
//! y(qt) = y (1 + b(q-1)t) (x + y) / ((1 + c(q-1)t) (x + y(1 + b(q-1)t)))
//! z(qt) = z + c(q-1)t y(qt)
//! ```
//!
//! The update is a ratio of nonnegative quantities, so nonnegative states stay
//! nonnegative, and the total population is conserved up to roundoff.

use crate::domain::{Params, SirState, Trajectory};
use crate::error::ModelError;

/// State together with the grid time it lives at.
///
/// The step consumes an explicit time rather than a grid index, so it can be
/// evaluated at any positive t; [`iterate`] pins times to the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInput {
    pub state: SirState,
    pub t: f64,
}

impl StepInput {
    pub fn new(state: SirState, t: f64) -> Result<Self, ModelError> {
        if !t.is_finite() {
            return Err(ModelError::NonFiniteInput("step time"));
        }
        if t <= 0.0 {
            return Err(ModelError::InvalidParameter(
                "step time must be positive".to_string(),
            ));
        }
        Ok(StepInput { state, t })
    }
}

/// Advances one state from t to qt.
///
/// Every state with `y = 0` is an equilibrium (the update ratios all collapse
/// to 1) and is returned unchanged, exactly; this also covers the origin
/// x = y = 0, where the general formula would hit 0/0. Initial data elsewhere
/// on the boundary of the positive cone are accepted; the convergence theorems
/// this scheme comes from assume x(t0) > 0 and y(t0) > 0, so boundary inputs
/// sit outside their hypotheses.
pub fn step(input: StepInput, params: Params) -> Result<SirState, ModelError> {
    let t = input.t;
    if !t.is_finite() || t <= 0.0 {
        return Err(ModelError::NonFiniteInput("step time"));
    }
    let x = input.state.x();
    let y = input.state.y();
    let z = input.state.z();
    if y == 0.0 {
        return Ok(input.state);
    }

    let bb = params.b() * (params.q() - 1.0) * t;
    let cc = params.c() * (params.q() - 1.0) * t;
    let s = x + y;
    let d = x + y * (1.0 + bb);
    let x2 = x * s / d;
    let y2 = y * (1.0 + bb) * s / ((1.0 + cc) * d);
    let z2 = z + cc * y2;
    if !(x2.is_finite() && y2.is_finite() && z2.is_finite()) {
        return Err(ModelError::NonFinite("step"));
    }
    Ok(SirState::new_unchecked(x2, y2, z2))
}

/// Runs `step` along the grid t0, qt0, q^2 t0, ... and records every state.
///
/// The returned trajectory has `n_steps + 1` records; record 0 is the initial
/// state at t0. Errors from individual steps carry the failing index; in
/// particular, once the grid time overflows to +inf the iteration reports a
/// non-finite input at that index.
pub fn iterate(
    state0: SirState,
    params: Params,
    n_steps: u64,
) -> Result<Trajectory, ModelError> {
    let mut traj = Trajectory::with_capacity(params, n_steps as usize + 1);
    let mut t = params.t0();
    let mut state = state0;
    traj.push(0, t, state);
    for k in 0..n_steps {
        let input = StepInput::new(state, t).map_err(|e| e.at_index(k + 1))?;
        state = step(input, params).map_err(|e| e.at_index(k + 1))?;
        t *= params.q();
        traj.push(k + 1, t, state);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum;
    use crate::domain::GridIndex;

    fn outbreak() -> Params {
        Params::new(0.3, 0.1, 1.1, 0.01).unwrap()
    }

    fn state(x: f64, y: f64, z: f64) -> SirState {
        SirState::new(x, y, z).unwrap()
    }

    #[test]
    fn step_matches_hand_substitution() {
        // b(q-1)t0 = 3e-4 and c(q-1)t0 = 1e-4, so
        // x' = 0.6 * 1.0 / (0.6 + 0.4 * 1.0003)
        // y' = 0.4 * 1.0003 * 1.0 / (1.0001 * 1.00012)
        // z' = 1e-4 * y'
        let out = step(
            StepInput::new(state(0.6, 0.4, 0.0), 0.01).unwrap(),
            outbreak(),
        )
        .unwrap();
        assert_eq!(out.x(), 0.5999280086389633);
        assert_eq!(out.y(), 0.40003198816222046);
        assert_eq!(out.z(), 4.000319881622208e-5);
    }

    #[test]
    fn step_without_susceptibles_decays_by_removal_only() {
        // With x = 0 the infected update collapses to y / (1 + c(q-1)t).
        let out = step(
            StepInput::new(state(0.0, 0.4, 0.6), 0.01).unwrap(),
            outbreak(),
        )
        .unwrap();
        assert_eq!(out.x(), 0.0);
        assert_eq!(out.y(), 0.4 / 1.0001);
        assert_eq!(out.z(), 0.6000399960003999);
    }

    #[test]
    fn step_keeps_infection_free_states_fixed() {
        let s = state(0.6, 0.0, 0.4);
        for t in [0.01, 1.0, 250.0] {
            let out = step(StepInput::new(s, t).unwrap(), outbreak()).unwrap();
            assert_eq!(out, s);
        }
        let origin = state(0.0, 0.0, 1.0);
        let out = step(StepInput::new(origin, 0.01).unwrap(), outbreak()).unwrap();
        assert_eq!(out, origin);
    }

    #[test]
    fn step_rejects_bad_times() {
        let s = state(0.6, 0.4, 0.0);
        assert!(StepInput::new(s, 0.0).is_err());
        assert!(StepInput::new(s, f64::NAN).is_err());
        assert!(StepInput::new(s, f64::INFINITY).is_err());
        let forged = StepInput {
            state: s,
            t: f64::INFINITY,
        };
        assert!(matches!(
            step(forged, outbreak()),
            Err(ModelError::NonFiniteInput(_))
        ));
    }

    #[test]
    fn iterate_composes_steps_on_the_grid() {
        let traj = iterate(state(0.6, 0.4, 0.0), outbreak(), 1).unwrap();
        assert_eq!(traj.len(), 2);
        let r0 = traj.get(0).unwrap();
        assert_eq!((r0.n, r0.t), (GridIndex(0), 0.01));
        assert_eq!(r0.state, state(0.6, 0.4, 0.0));
        let r1 = traj.get(1).unwrap();
        assert_eq!(r1.t, 0.01 * 1.1);
        assert_eq!(r1.state.x(), 0.5999280086389633);
        assert_eq!(r1.state.y(), 0.40003198816222046);
    }

    #[test]
    fn iterate_holds_fixed_points_for_all_indices() {
        let traj = iterate(state(0.6, 0.0, 0.4), outbreak(), 100).unwrap();
        assert_eq!(traj.len(), 101);
        for r in traj.records() {
            assert_eq!(r.state, state(0.6, 0.0, 0.4));
        }
    }

    #[test]
    fn long_outbreak_run_reaches_the_disease_free_limit() {
        let traj = iterate(state(0.6, 0.4, 0.0), outbreak(), 200).unwrap();
        let last = traj.last().unwrap().state;
        assert!(last.y() < 1e-3);
        assert!(last.z() > 0.99);
    }

    #[test]
    fn conservation_holds_along_a_long_run() {
        let traj = iterate(state(0.6, 0.4, 0.0), outbreak(), 200).unwrap();
        for r in traj.records() {
            assert!((r.state.total_population() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn iterate_reports_the_index_where_the_grid_overflows() {
        let p = Params::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let err = iterate(state(0.6, 0.4, 0.0), p, 5000).unwrap_err();
        match err {
            ModelError::AtIndex { index, source } => {
                assert!(index > 1000);
                assert!(matches!(*source, ModelError::NonFiniteInput(_)));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn difference_quotient_approaches_the_continuous_rates() {
        // (step(state) - state) / ((q-1) t) against the continuous right-hand
        // side at t = 1, first order in q - 1.
        let s = state(0.6, 0.4, 0.0);
        let rates = continuum::rhs(s, Params::new(0.3, 0.1, 1.5, 0.01).unwrap());
        let mut errs = Vec::new();
        for qm1 in [1e-3, 1e-4, 1e-5] {
            let p = Params::new(0.3, 0.1, 1.0 + qm1, 0.01).unwrap();
            let out = step(StepInput::new(s, 1.0).unwrap(), p).unwrap();
            let h = qm1 * 1.0;
            let dq = (
                (out.x() - s.x()) / h,
                (out.y() - s.y()) / h,
                (out.z() - s.z()) / h,
            );
            let err = (dq.0 - rates.0)
                .abs()
                .max((dq.1 - rates.1).abs())
                .max((dq.2 - rates.2).abs());
            errs.push(err);
        }
        assert!(errs[0] < 2e-5);
        // each decade in q - 1 shrinks the defect by about a decade
        assert!(errs[1] < errs[0] / 5.0);
        assert!(errs[2] < errs[1] / 5.0);
    }
}
