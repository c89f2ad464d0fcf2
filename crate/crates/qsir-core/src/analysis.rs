//! Reproduction number, equilibrium classification, convergence-condition
//! checks over finite horizons, factor-sequence diagnostics, and numerical
//! estimation of the susceptible limit.

use crate::domain::{Params, SirState};
use crate::error::ModelError;
use crate::exact::ExactTerms;

/// Basic reproduction number b/c.
pub fn reproduction_number(params: Params) -> f64 {
    params.b() / params.c()
}

/// Predicted infection-free limit of a trajectory.
///
/// Every equilibrium has the shape (alpha, 0, N - alpha); the reproduction
/// number decides whether the susceptible pool empties on the way there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitClass {
    /// R0 >= 1: predicted limit (0, 0, N).
    FullDepletion,
    /// R0 < 1: predicted limit (alpha, 0, N - alpha) with alpha > 0.
    PartialDepletion,
}

impl std::fmt::Display for LimitClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitClass::FullDepletion => {
                write!(f, "disease-free, full depletion: limit (0, 0, N)")
            }
            LimitClass::PartialDepletion => write!(
                f,
                "disease-free, partial depletion: limit (alpha, 0, N - alpha)"
            ),
        }
    }
}

/// Classification by reproduction number alone. Advisory: confirm the actual
/// limit with [`estimate_alpha`].
pub fn classify_limit(params: Params) -> LimitClass {
    if reproduction_number(params) >= 1.0 {
        LimitClass::FullDepletion
    } else {
        LimitClass::PartialDepletion
    }
}

/// Factor sequences of the closed form over a finite horizon, with the
/// per-index decay condition and monotonicity summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// xi_i for i = 0..horizon-1.
    pub xi_seq: Vec<f64>,
    /// a_i for i = 0..horizon-1.
    pub a_seq: Vec<f64>,
    /// ~a_i = a_i / xi_{i+1} for i = 0..horizon-1.
    pub a_tilde_seq: Vec<f64>,
    /// Per-index verdicts ~a_i < 1.
    pub condition_ok: Vec<bool>,
    /// Number of indices evaluated.
    pub horizon: usize,
    /// Whether xi_{i+1} < xi_i at every compared index.
    pub xi_decreasing: bool,
    /// Whether xi_i > 1 at every index.
    pub xi_above_one: bool,
    /// Whether a_{i+1} < a_i at every compared index.
    pub a_decreasing: bool,
}

impl Diagnostics {
    /// Conjunction of the per-index condition verdicts.
    pub fn condition_holds(&self) -> bool {
        self.condition_ok.iter().all(|&ok| ok)
    }

    /// Indices where the decay condition ~a_i < 1 fails.
    pub fn violations(&self) -> Vec<usize> {
        self.condition_ok
            .iter()
            .enumerate()
            .filter_map(|(i, &ok)| (!ok).then_some(i))
            .collect()
    }
}

fn diagnostics(
    params: Params,
    state0: SirState,
    horizon: usize,
) -> Result<Diagnostics, ModelError> {
    let terms = ExactTerms::new(state0, params)?;
    let mut xi_seq = Vec::with_capacity(horizon);
    let mut a_seq = Vec::with_capacity(horizon);
    let mut a_tilde_seq = Vec::with_capacity(horizon);
    let mut condition_ok = Vec::with_capacity(horizon);
    for term in terms.factors().take(horizon) {
        xi_seq.push(term.xi);
        a_seq.push(term.a);
        a_tilde_seq.push(term.a_tilde);
        condition_ok.push(term.a_tilde < 1.0);
    }
    let xi_decreasing = xi_seq.windows(2).all(|w| w[1] < w[0]);
    let xi_above_one = xi_seq.iter().all(|&v| v > 1.0);
    let a_decreasing = a_seq.windows(2).all(|w| w[1] < w[0]);
    Ok(Diagnostics {
        xi_seq,
        a_seq,
        a_tilde_seq,
        condition_ok,
        horizon,
        xi_decreasing,
        xi_above_one,
        a_decreasing,
    })
}

/// Evaluates the decay condition ~a_i < 1 for i = 0..horizon-1.
///
/// The condition is stated for all i >= 0, which no finite run can decide;
/// callers report the horizon alongside the verdict. The sequences come from
/// the same accumulators the closed-form evaluator uses.
pub fn check_theorem_condition(
    params: Params,
    state0: SirState,
    horizon: usize,
) -> Result<Diagnostics, ModelError> {
    diagnostics(params, state0, horizon)
}

/// Same sequences as [`check_theorem_condition`], exposed for their
/// monotonicity summaries (xi_decreasing, xi_above_one, a_decreasing).
pub fn sequence_diagnostics(
    params: Params,
    state0: SirState,
    horizon: usize,
) -> Result<Diagnostics, ModelError> {
    diagnostics(params, state0, horizon)
}

/// Outcome of the limit search along the closed-form trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    /// Last susceptible value reached; the limit estimate.
    pub alpha: f64,
    /// Whether the stopping rule fired before max_n.
    pub converged: bool,
    /// Grid index at which iteration stopped.
    pub steps_used: u64,
    /// Last |x(t_{n+1}) - x(t_n)|.
    pub residual: f64,
}

/// Walks the closed-form solution until the susceptible fraction settles:
/// |x(t_{n+1}) - x(t_n)| < tol * N together with y(t_n) < tol * N, or until
/// n = max_n. Both tests are required because x can plateau transiently while
/// infections are still circulating.
///
/// y(t0) = 0 converges immediately at the initial state. Non-convergence is
/// reported through the flag, never as an error.
pub fn estimate_alpha(
    params: Params,
    state0: SirState,
    tol: f64,
    max_n: u64,
) -> LimitEstimate {
    debug_assert!(tol > 0.0, "tolerance must be positive");
    if state0.y() == 0.0 {
        return LimitEstimate {
            alpha: state0.x(),
            converged: true,
            steps_used: 0,
            residual: 0.0,
        };
    }
    let n_total = state0.total_population();
    let terms = ExactTerms::new(state0, params).expect("y > 0 was just checked");

    let mut x_prev = state0.x();
    let mut x = state0.x() * terms.prefactor();
    let mut y = (state0.y() / terms.xi(0)) * terms.prefactor();
    let mut n = 1u64;
    let mut residual = (x - x_prev).abs();
    if residual < tol * n_total && y < tol * n_total {
        return LimitEstimate {
            alpha: x,
            converged: true,
            steps_used: n,
            residual,
        };
    }
    let mut factors = terms.factors();
    while n < max_n {
        let term = factors.next().expect("factor stream is infinite");
        x_prev = x;
        x *= term.a;
        y *= term.a_tilde;
        n += 1;
        residual = (x - x_prev).abs();
        if residual < tol * n_total && y < tol * n_total {
            return LimitEstimate {
                alpha: x,
                converged: true,
                steps_used: n,
                residual,
            };
        }
    }
    LimitEstimate {
        alpha: x,
        converged: false,
        steps_used: n,
        residual,
    }
}
