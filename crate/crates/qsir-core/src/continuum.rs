//! Fixed-step RK4 reference integrator for the continuous SIR system
//!
//! ```text
//! x' = -b x y / (x + y)
//! y' =  b x y / (x + y) - c y
//! z' =  c y
//! ```
//!
//! This is the q -> 1 limit of the quantum scheme and serves as its
//! consistency oracle. The vector field sums to zero componentwise, so every
//! RK4 stage sum does too and the total population is conserved to roundoff.

use crate::domain::{Params, SirState, Trajectory};
use crate::error::ModelError;

/// Incidence is treated as 0 once x + y falls below this threshold, which is
/// under the roundoff floor of the N = 1 scale.
const INCIDENCE_GUARD: f64 = 1e-15;

/// Hard ceiling on the number of fixed steps a single call may take.
const MAX_STEPS: f64 = 1e7;

/// Step size and final time of one integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumConfig {
    dt: f64,
    t_end: f64,
}

impl ContinuumConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self, ModelError> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(ModelError::InvalidParameter(
                "dt must be positive and finite".to_string(),
            ));
        }
        if !t_end.is_finite() {
            return Err(ModelError::InvalidParameter(
                "t_end must be finite".to_string(),
            ));
        }
        Ok(ContinuumConfig { dt, t_end })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }
}

fn rhs_raw(x: f64, y: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let s = x + y;
    let inc = if s < INCIDENCE_GUARD { 0.0 } else { b * x * y / s };
    let rec = c * y;
    (-inc, inc - rec, rec)
}

/// Instantaneous rates (x', y', z') of the continuous system.
pub fn rhs(s: SirState, params: Params) -> (f64, f64, f64) {
    rhs_raw(s.x(), s.y(), params.b(), params.c())
}

fn rk4_kernel(x: f64, y: f64, z: f64, h: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let k1 = rhs_raw(x, y, b, c);
    let k2 = rhs_raw(x + 0.5 * h * k1.0, y + 0.5 * h * k1.1, b, c);
    let k3 = rhs_raw(x + 0.5 * h * k2.0, y + 0.5 * h * k2.1, b, c);
    let k4 = rhs_raw(x + h * k3.0, y + h * k3.1, b, c);
    let nx = x + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
    let ny = y + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    let nz = z + h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
    (nx, ny, nz)
}

fn clamp_step(
    s: SirState,
    h: f64,
    params: Params,
    clamped: &mut u64,
) -> Result<SirState, ModelError> {
    let (nx, ny, nz) = rk4_kernel(s.x(), s.y(), s.z(), h, params.b(), params.c());
    if !(nx.is_finite() && ny.is_finite() && nz.is_finite()) {
        return Err(ModelError::NonFinite("rk4 step"));
    }
    // RK4 is not positivity preserving; tiny undershoots are clamped and
    // counted so callers can surface them.
    for v in [nx, ny, nz] {
        if v < 0.0 {
            *clamped += 1;
        }
    }
    Ok(SirState::new_unchecked(
        nx.max(0.0),
        ny.max(0.0),
        nz.max(0.0),
    ))
}

/// One classical RK4 update of size `dt`.
pub fn rk4_step(s: SirState, dt: f64, params: Params) -> Result<SirState, ModelError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(ModelError::InvalidParameter(
            "dt must be positive and finite".to_string(),
        ));
    }
    let mut ignored = 0;
    clamp_step(s, dt, params, &mut ignored)
}

/// Uniform-grid integration from `t_start` to `cfg.t_end`, recording every
/// step. The last step is shortened so the final record lands exactly on
/// `t_end`. Returns the trajectory and the number of clamped undershoots.
pub fn integrate_with_stats(
    state0: SirState,
    cfg: ContinuumConfig,
    params: Params,
    t_start: f64,
) -> Result<(Trajectory, u64), ModelError> {
    if !t_start.is_finite() {
        return Err(ModelError::NonFiniteInput("integration start time"));
    }
    if cfg.t_end <= t_start {
        return Err(ModelError::InvalidParameter(
            "t_end must exceed the start time".to_string(),
        ));
    }
    let span_steps = (cfg.t_end - t_start) / cfg.dt;
    if !(span_steps <= MAX_STEPS) {
        return Err(ModelError::SpanTooLarge(span_steps));
    }

    let mut traj = Trajectory::with_capacity(params, span_steps as usize + 2);
    let mut clamped = 0u64;
    let mut s = state0;
    let mut t = t_start;
    let mut n = 0u64;
    traj.push(0, t, s);
    while t + cfg.dt <= cfg.t_end * (1.0 - 1e-14) {
        s = clamp_step(s, cfg.dt, params, &mut clamped)?;
        t += cfg.dt;
        n += 1;
        traj.push(n, t, s);
    }
    let h = cfg.t_end - t;
    if h > 1e-15 * cfg.t_end.abs().max(1.0) {
        s = clamp_step(s, h, params, &mut clamped)?;
        n += 1;
        traj.push(n, cfg.t_end, s);
    } else {
        traj.set_last_time(cfg.t_end);
    }
    Ok((traj, clamped))
}

/// [`integrate_with_stats`] without the clamp counter.
pub fn integrate(
    state0: SirState,
    cfg: ContinuumConfig,
    params: Params,
    t_start: f64,
) -> Result<Trajectory, ModelError> {
    integrate_with_stats(state0, cfg, params, t_start).map(|(traj, _)| traj)
}

/// Integrates once through `times` (nondecreasing, starting at or after
/// `t_start`) and returns the state at each requested instant, landing on
/// every checkpoint exactly via a shortened final substep.
pub fn sample_at(
    state0: SirState,
    params: Params,
    dt: f64,
    t_start: f64,
    times: &[f64],
) -> Result<(Vec<SirState>, u64), ModelError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(ModelError::InvalidParameter(
            "dt must be positive and finite".to_string(),
        ));
    }
    if let Some(&last) = times.last() {
        if !last.is_finite() {
            return Err(ModelError::NonFiniteInput("sample time"));
        }
        let span_steps = (last - t_start) / dt;
        if !(span_steps <= MAX_STEPS) {
            return Err(ModelError::SpanTooLarge(span_steps));
        }
    }

    let mut out = Vec::with_capacity(times.len());
    let mut clamped = 0u64;
    let mut s = state0;
    let mut t = t_start;
    for &target in times {
        if target < t - 1e-12 {
            return Err(ModelError::InvalidParameter(
                "sample times must be nondecreasing and start at or after t_start"
                    .to_string(),
            ));
        }
        while t + dt <= target * (1.0 - 1e-14) {
            s = clamp_step(s, dt, params, &mut clamped)?;
            t += dt;
        }
        let h = target - t;
        if h > 1e-15 * target.abs().max(1.0) {
            s = clamp_step(s, h, params, &mut clamped)?;
        }
        t = target;
        out.push(s);
    }
    Ok((out, clamped))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outbreak() -> Params {
        Params::new(0.3, 0.1, 1.1, 0.01).unwrap()
    }

    fn subcritical() -> Params {
        Params::new(0.3, 0.6, 1.1, 0.01).unwrap()
    }

    fn init() -> SirState {
        SirState::new(0.6, 0.4, 0.0).unwrap()
    }

    #[test]
    fn rhs_matches_hand_evaluation() {
        let (dx, dy, dz) = rhs(init(), outbreak());
        assert_eq!(dx, -0.072);
        assert_eq!(dy, 0.03199999999999999);
        assert_eq!(dz, 0.04000000000000001);
        assert_eq!(dx + dy + dz, 0.0);
    }

    #[test]
    fn rhs_vanishes_without_infected() {
        let s = SirState::new(0.6, 0.0, 0.4).unwrap();
        assert_eq!(rhs(s, outbreak()), (0.0, 0.0, 0.0));
        let origin = SirState::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(rhs(origin, outbreak()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rk4_leaves_fixed_points_alone() {
        let s = SirState::new(0.6, 0.0, 0.4).unwrap();
        let out = rk4_step(s, 0.25, outbreak()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn rk4_reproduces_linear_decay_when_b_is_zero() {
        // With b = 0 the infected fraction solves y' = -c y exactly.
        let p = Params::new(1e-300, 0.1, 1.1, 0.01).unwrap();
        let mut s = init();
        for _ in 0..100 {
            s = rk4_step(s, 0.1, p).unwrap();
        }
        let expected = 0.4 * (-1.0f64).exp();
        assert!((s.y() - expected).abs() < 1e-7);
        assert_eq!(s.x(), 0.6);
    }

    #[test]
    fn one_step_conserves_population_to_roundoff() {
        let out = rk4_step(init(), 0.01, outbreak()).unwrap();
        assert!((out.total_population() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn integrate_reaches_the_outbreak_continuous_limit() {
        let cfg = ContinuumConfig::new(0.01, 100.0).unwrap();
        let traj = integrate(init(), cfg, outbreak(), 0.01).unwrap();
        let last = traj.last().unwrap();
        assert_eq!(last.t, 100.0);
        assert!(last.state.y() < 1e-2);
        assert!(last.state.z() > 0.98);
        for r in traj.records() {
            assert!((r.state.total_population() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn integrate_reaches_the_subcritical_continuous_limit() {
        let cfg = ContinuumConfig::new(0.01, 100.0).unwrap();
        let traj = integrate(init(), cfg, subcritical(), 0.01).unwrap();
        let last = traj.last().unwrap().state;
        assert!(last.y() < 1e-6);
        assert!(last.x() > 0.0);
    }

    #[test]
    fn integrate_keeps_x_and_z_monotone() {
        let cfg = ContinuumConfig::new(0.05, 50.0).unwrap();
        let traj = integrate(init(), cfg, outbreak(), 0.0).unwrap();
        for w in traj.records().windows(2) {
            assert!(w[1].state.x() <= w[0].state.x());
            assert!(w[1].state.z() >= w[0].state.z());
        }
    }

    #[test]
    fn constant_trajectory_without_infected() {
        let s = SirState::new(0.6, 0.0, 0.4).unwrap();
        let cfg = ContinuumConfig::new(0.1, 10.0).unwrap();
        let traj = integrate(s, cfg, outbreak(), 0.0).unwrap();
        assert!(traj.records().iter().all(|r| r.state == s));
    }

    #[test]
    fn halving_dt_gains_about_sixteenfold_accuracy() {
        let reference = sample_at(init(), outbreak(), 0.01, 0.01, &[10.0])
            .unwrap()
            .0[0];
        let coarse = sample_at(init(), outbreak(), 0.08, 0.01, &[10.0]).unwrap().0[0];
        let fine = sample_at(init(), outbreak(), 0.04, 0.01, &[10.0]).unwrap().0[0];
        let e_coarse = coarse.max_component_gap(&reference);
        let e_fine = fine.max_component_gap(&reference);
        let ratio = e_coarse / e_fine;
        assert!(
            (10.0..26.0).contains(&ratio),
            "expected fourth-order gain, got {ratio}"
        );
    }

    #[test]
    fn sampling_lands_exactly_on_checkpoints() {
        let times = [0.01, 0.5, 1.0, 2.75, 10.0];
        let (states, _) = sample_at(init(), outbreak(), 0.01, 0.01, &times).unwrap();
        assert_eq!(states.len(), times.len());
        assert_eq!(states[0], init());
        // one uninterrupted integration to t = 10 agrees with the checkpointed run
        let (direct, _) = sample_at(init(), outbreak(), 0.01, 0.01, &[10.0]).unwrap();
        assert!(states[4].max_component_gap(&direct[0]) <= 1e-9);
    }

    #[test]
    fn span_guard_rejects_absurd_step_counts() {
        let cfg = ContinuumConfig::new(1e-6, 100.0).unwrap();
        assert!(matches!(
            integrate(init(), cfg, outbreak(), 0.0),
            Err(ModelError::SpanTooLarge(_))
        ));
        assert!(matches!(
            sample_at(init(), outbreak(), 1e-6, 0.0, &[100.0]),
            Err(ModelError::SpanTooLarge(_))
        ));
    }

    #[test]
    fn config_rejects_degenerate_inputs() {
        assert!(ContinuumConfig::new(0.0, 1.0).is_err());
        assert!(ContinuumConfig::new(-0.1, 1.0).is_err());
        assert!(ContinuumConfig::new(0.1, f64::NAN).is_err());
        let cfg = ContinuumConfig::new(0.1, 1.0).unwrap();
        assert!(integrate(init(), cfg, outbreak(), 2.0).is_err());
    }
}
