//! Shared domain types: model parameters, compartment states, the geometric
//! time grid t_n = q^n t0, and trajectory containers.

use crate::error::ModelError;

/// Epidemic and grid constants: infection rate `b`, removal rate `c`, grid
/// ratio `q` and initial time `t0`.
///
/// All four are validated at construction; every function in this crate may
/// assume `b > 0`, `c > 0`, `q > 1` and `t0 > 0`, all finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    b: f64,
    c: f64,
    q: f64,
    t0: f64,
}

impl Params {
    pub fn new(b: f64, c: f64, q: f64, t0: f64) -> Result<Self, ModelError> {
        let bad = |msg: &str| Err(ModelError::InvalidParameter(msg.to_string()));
        if !b.is_finite() {
            return bad("b must be finite");
        }
        if b <= 0.0 {
            return bad("b must be positive");
        }
        if !c.is_finite() {
            return bad("c must be finite");
        }
        if c <= 0.0 {
            return bad("c must be positive");
        }
        if q.is_nan() || q <= 1.0 {
            return bad("q must exceed 1");
        }
        if !q.is_finite() {
            return bad("q must be finite");
        }
        if !t0.is_finite() {
            return bad("t0 must be finite");
        }
        if t0 <= 0.0 {
            return bad("t0 must be positive");
        }
        Ok(Params { b, c, q, t0 })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Same rates and initial time with a different grid ratio.
    pub fn with_q(&self, q: f64) -> Result<Self, ModelError> {
        Params::new(self.b, self.c, q, self.t0)
    }
}

/// Susceptible/infected/removed fractions at one instant.
///
/// Components are finite and nonnegative by construction. The dynamics
/// conserve the total `x + y + z`; that conservation is asserted by tests,
/// never silently enforced by renormalizing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirState {
    x: f64,
    y: f64,
    z: f64,
}

impl SirState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, ModelError> {
        for (v, name) in [(x, "x"), (y, "y"), (z, "z")] {
            if !v.is_finite() {
                return Err(ModelError::InvalidState(format!("{name} must be finite")));
            }
            if v < 0.0 {
                return Err(ModelError::InvalidState(format!(
                    "{name} must be nonnegative"
                )));
            }
        }
        Ok(SirState { x, y, z })
    }

    /// Constructor for values already known to be finite and nonnegative.
    pub(crate) fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        debug_assert!(x >= 0.0 && y >= 0.0 && z >= 0.0);
        SirState { x, y, z }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Total population N = x + y + z.
    pub fn total_population(&self) -> f64 {
        self.x + self.y + self.z
    }

    /// Largest componentwise absolute difference against another state.
    pub fn max_component_gap(&self, other: &SirState) -> f64 {
        let dx = (self.x - other.x).abs();
        let dy = (self.y - other.y).abs();
        let dz = (self.z - other.z).abs();
        dx.max(dy).max(dz)
    }
}

/// Nonnegative step count along the quantum grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GridIndex(pub u64);

impl From<u64> for GridIndex {
    fn from(n: u64) -> Self {
        GridIndex(n)
    }
}

impl std::fmt::Display for GridIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Grid time t_n = q^n t0, computed by running multiplication so that
/// grid_time(n + 1) is bitwise q * grid_time(n).
///
/// Overflow saturates to +inf; consumers treat an infinite time as the end of
/// the usable grid.
pub fn grid_time(n: GridIndex, params: Params) -> f64 {
    let mut t = params.t0();
    for _ in 0..n.0 {
        t *= params.q();
    }
    t
}

/// One sampled instant of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub n: GridIndex,
    pub t: f64,
    pub state: SirState,
}

/// Ordered run of states, one record per step index.
///
/// Quantum constructors (`recurrence::iterate`, `exact::exact_trajectory`)
/// place record n at grid_time(n). The continuous integrator reuses the same
/// container with a uniform time grid, n counting integrator steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    params: Params,
    records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    pub(crate) fn with_capacity(params: Params, cap: usize) -> Self {
        Trajectory {
            params,
            records: Vec::with_capacity(cap),
        }
    }

    pub(crate) fn push(&mut self, n: u64, t: f64, state: SirState) {
        debug_assert!(self.records.last().map_or(n == 0, |r| r.n.0 + 1 == n));
        self.records.push(TrajectoryRecord {
            n: GridIndex(n),
            t,
            state,
        });
    }

    pub(crate) fn set_last_time(&mut self, t: f64) {
        if let Some(last) = self.records.last_mut() {
            last.t = t;
        }
    }

    /// Rebuilds a trajectory from already validated records, checking that
    /// indices are contiguous from the first and times strictly increase.
    pub fn from_parts(
        params: Params,
        records: Vec<TrajectoryRecord>,
    ) -> Result<Self, ModelError> {
        for pair in records.windows(2) {
            if pair[1].n.0 != pair[0].n.0 + 1 {
                return Err(ModelError::InvalidState(format!(
                    "record indices must be contiguous, found {} after {}",
                    pair[1].n, pair[0].n
                )));
            }
            if !(pair[1].t > pair[0].t) {
                return Err(ModelError::InvalidState(format!(
                    "record times must strictly increase, found {} after {}",
                    pair[1].t, pair[0].t
                )));
            }
        }
        if let Some(first) = records.first() {
            if !first.t.is_finite() {
                return Err(ModelError::InvalidState(
                    "record times must be finite".to_string(),
                ));
            }
        }
        Ok(Trajectory { params, records })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn records(&self) -> &[TrajectoryRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TrajectoryRecord> {
        self.records.last()
    }

    pub fn get(&self, n: usize) -> Option<&TrajectoryRecord> {
        self.records.get(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outbreak() -> Params {
        Params::new(0.3, 0.1, 1.1, 0.01).unwrap()
    }

    #[test]
    fn params_reject_out_of_domain_values() {
        assert!(matches!(
            Params::new(0.3, 0.1, 1.0, 0.01),
            Err(ModelError::InvalidParameter(m)) if m == "q must exceed 1"
        ));
        assert!(Params::new(0.0, 0.1, 1.1, 0.01).is_err());
        assert!(Params::new(0.3, -0.1, 1.1, 0.01).is_err());
        assert!(Params::new(0.3, 0.1, 1.1, 0.0).is_err());
        assert!(Params::new(0.3, 0.1, f64::NAN, 0.01).is_err());
        assert!(Params::new(0.3, 0.1, f64::INFINITY, 0.01).is_err());
    }

    #[test]
    fn state_rejects_negative_and_non_finite_components() {
        assert!(SirState::new(0.6, 0.4, 0.0).is_ok());
        assert!(SirState::new(-0.1, 0.4, 0.0).is_err());
        assert!(SirState::new(0.6, f64::NAN, 0.0).is_err());
        assert!(SirState::new(0.6, 0.4, f64::INFINITY).is_err());
    }

    #[test]
    fn total_population_sums_components() {
        let s = SirState::new(0.6, 0.4, 0.0).unwrap();
        assert_eq!(s.total_population(), 1.0);
        assert_eq!(SirState::new(0.0, 0.0, 0.0).unwrap().total_population(), 0.0);
        assert_eq!(
            SirState::new(0.2, 0.3, 0.5).unwrap().total_population(),
            1.0
        );
    }

    #[test]
    fn grid_time_matches_hand_multiplication() {
        let p = outbreak();
        assert_eq!(grid_time(GridIndex(0), p), 0.01);
        assert_eq!(grid_time(GridIndex(1), p), 0.01 * 1.1);
        assert_eq!(grid_time(GridIndex(2), p), 0.01 * 1.1 * 1.1);
        assert!((grid_time(GridIndex(1), p) - 0.011).abs() < 1e-17);
        assert!((grid_time(GridIndex(2), p) - 0.0121).abs() < 1e-17);
    }

    #[test]
    fn grid_time_is_strictly_increasing_and_ratio_stable() {
        let p = Params::new(1.0, 1.0, 1.5, 0.5).unwrap();
        let mut prev = grid_time(GridIndex(0), p);
        for n in 1..80 {
            let t = grid_time(GridIndex(n), p);
            assert!(t > prev);
            let ratio = t / prev;
            assert!((ratio - p.q()).abs() <= 1e-15 * p.q());
            prev = t;
        }
    }

    #[test]
    fn grid_time_saturates_to_infinity() {
        let p = Params::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let t = grid_time(GridIndex(5000), p);
        assert!(t.is_infinite() && t > 0.0);
    }

    #[test]
    fn trajectory_from_parts_validates_ordering() {
        let p = outbreak();
        let s = SirState::new(0.6, 0.4, 0.0).unwrap();
        let rec = |n, t| TrajectoryRecord {
            n: GridIndex(n),
            t,
            state: s,
        };
        assert!(Trajectory::from_parts(p, vec![rec(0, 0.01), rec(1, 0.011)]).is_ok());
        assert!(Trajectory::from_parts(p, vec![rec(0, 0.01), rec(2, 0.011)]).is_err());
        assert!(Trajectory::from_parts(p, vec![rec(0, 0.011), rec(1, 0.01)]).is_err());
        assert!(Trajectory::from_parts(p, vec![]).unwrap().is_empty());
    }
}
