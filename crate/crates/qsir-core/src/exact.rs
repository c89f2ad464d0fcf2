//! Closed-form evaluation of the quantum SIR system at any grid index.
//!
//! With kb = x(t0)/y(t0) and u_k = (q-1) q^k t0, the solution on the grid is a
//! product of per-index factors:
//!
//! ```text
//! xi_k = (1 + c u_k) / (1 + b u_k)
//! P_i  = kb * xi_0 * xi_1 * ... * xi_i
//! a_i  = 1 / (1 + b u_{i+1} / (1 + P_i))
//! ~a_i = a_i / xi_{i+1}
//!
//! x(t_1) = x0 * (kb + 1) / (kb + 1 + b u_0)
//! y(t_1) = (y0 / xi_0) * (kb + 1) / (kb + 1 + b u_0)
//! x(t_n) = x(t_1) * a_0 * a_1 * ... * a_{n-2}        for n >= 2
//! y(t_n) = y(t_1) * ~a_0 * ~a_1 * ... * ~a_{n-2}
//! z(t_n) = N - x(t_n) - y(t_n)
//! ```
//!
//! Everything here is evaluated with incremental accumulators for u_k and P_i,
//! one multiplication per index, so a fresh evaluation at index n and the n-th
//! record of an incremental trajectory run through identical arithmetic.

use crate::domain::{GridIndex, Params, SirState, Trajectory};
use crate::error::ModelError;

/// Accumulator magnitude beyond which factor arithmetic moves to log space.
const LOG_SPACE_CUTOFF: f64 = 1e300;

/// Threshold on u_k above which xi is evaluated in reciprocal form.
const XI_RECIPROCAL_CUTOFF: f64 = 1e150;

fn xi_from_u(u: f64, b: f64, c: f64) -> f64 {
    // For huge u (including +inf after grid saturation) the literal form would
    // divide infinity by infinity; the reciprocal form tends to c/b smoothly.
    if u > XI_RECIPROCAL_CUTOFF {
        let inv = 1.0 / u;
        (inv + c) / (inv + b)
    } else {
        (1.0 + c * u) / (1.0 + b * u)
    }
}

/// Per-step ratio xi_k = (1 + c(q-1)q^k t0) / (1 + b(q-1)q^k t0).
///
/// Equals 1 exactly when b = c; below 1 and decreasing toward c/b when b > c;
/// above 1 when b < c.
pub fn xi(k: u64, params: Params) -> f64 {
    let mut u = (params.q() - 1.0) * params.t0();
    for _ in 0..k {
        u *= params.q();
    }
    xi_from_u(u, params.b(), params.c())
}

/// Initial susceptible-to-infected ratio x(t0)/y(t0).
pub fn kappa_bar(state0: SirState) -> Result<f64, ModelError> {
    if state0.y() == 0.0 {
        return Err(ModelError::ZeroInfected);
    }
    Ok(state0.x() / state0.y())
}

/// One index worth of product factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorTerm {
    pub xi: f64,
    pub a: f64,
    pub a_tilde: f64,
}

/// Infinite iterator over (xi_i, a_i, ~a_i), i = 0, 1, 2, ...
///
/// u_k and P_i advance by one multiplication per index. Both are shadowed by
/// log-space accumulators; once either value passes 1e300 the a-factor ratio
/// b u_{i+1} / (1 + P_i) is formed as exp(log b u_{i+1} - log(1 + P_i)), with
/// log(1 + P_i) taken as log P_i when P_i itself is huge.
#[derive(Debug, Clone)]
pub struct Factors {
    b: f64,
    c: f64,
    q: f64,
    ln_b: f64,
    ln_q: f64,
    u: f64,
    log_u: f64,
    xi_cur: f64,
    p_prev: f64,
    log_p_prev: f64,
}

impl Factors {
    fn new(params: Params, kappa_bar: f64) -> Self {
        let u0 = (params.q() - 1.0) * params.t0();
        Factors {
            b: params.b(),
            c: params.c(),
            q: params.q(),
            ln_b: params.b().ln(),
            ln_q: params.q().ln(),
            u: u0,
            log_u: u0.ln(),
            xi_cur: xi_from_u(u0, params.b(), params.c()),
            p_prev: kappa_bar,
            log_p_prev: kappa_bar.ln(),
        }
    }
}

impl Iterator for Factors {
    type Item = FactorTerm;

    fn next(&mut self) -> Option<FactorTerm> {
        let p_i = self.p_prev * self.xi_cur;
        let log_p_i = self.log_p_prev + self.xi_cur.ln();
        let u_next = self.u * self.q;
        let log_u_next = self.log_u + self.ln_q;
        let xi_next = xi_from_u(u_next, self.b, self.c);

        let b_i = self.b * u_next;
        let r = if b_i < LOG_SPACE_CUTOFF && p_i < LOG_SPACE_CUTOFF {
            b_i / (1.0 + p_i)
        } else {
            let log_b_i = self.ln_b + log_u_next;
            let log_1p = if p_i < LOG_SPACE_CUTOFF {
                (1.0 + p_i).ln()
            } else {
                log_p_i
            };
            (log_b_i - log_1p).exp()
        };
        let a = 1.0 / (1.0 + r);
        let a_tilde = a / xi_next;

        let term = FactorTerm {
            xi: self.xi_cur,
            a,
            a_tilde,
        };
        self.p_prev = p_i;
        self.log_p_prev = log_p_i;
        self.u = u_next;
        self.log_u = log_u_next;
        self.xi_cur = xi_next;
        Some(term)
    }
}

/// Cached constants of the closed form for one (state0, params) pair.
#[derive(Debug, Clone, Copy)]
pub struct ExactTerms {
    params: Params,
    state0: SirState,
    kappa_bar: f64,
    xi0: f64,
    prefactor: f64,
}

impl ExactTerms {
    /// Fails with [`ModelError::ZeroInfected`] when y(t0) = 0; the recurrence
    /// covers that slice instead. x(t0) = 0 is accepted even though the
    /// underlying theorems assume x(t0) > 0: with kb = 0 the products collapse
    /// to the pure removal recursion, which matches the recurrence exactly.
    pub fn new(state0: SirState, params: Params) -> Result<Self, ModelError> {
        let kb = kappa_bar(state0)?;
        let u0 = (params.q() - 1.0) * params.t0();
        let xi0 = xi_from_u(u0, params.b(), params.c());
        let prefactor = (kb + 1.0) / (kb + 1.0 + params.b() * u0);
        Ok(ExactTerms {
            params,
            state0,
            kappa_bar: kb,
            xi0,
            prefactor,
        })
    }

    pub fn kappa_bar(&self) -> f64 {
        self.kappa_bar
    }

    pub fn xi(&self, k: u64) -> f64 {
        xi(k, self.params)
    }

    /// Common factor (kb + 1) / (kb + 1 + b(q-1)t0) of x(t_1) and y(t_1).
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// Product factors (xi_i, a_i, ~a_i) from i = 0 on; never terminates on
    /// its own, take as many terms as the horizon needs.
    pub fn factors(&self) -> Factors {
        Factors::new(self.params, self.kappa_bar)
    }

    fn states(&self) -> ExactStates {
        ExactStates {
            n_total: self.state0.total_population(),
            x: self.state0.x(),
            y: self.state0.y(),
            z0: self.state0.z(),
            xi0: self.xi0,
            prefactor: self.prefactor,
            factors: self.factors(),
            idx: 0,
        }
    }
}

/// Iterator of exact states at indices 0, 1, 2, ...
struct ExactStates {
    n_total: f64,
    x: f64,
    y: f64,
    z0: f64,
    xi0: f64,
    prefactor: f64,
    factors: Factors,
    idx: u64,
}

impl Iterator for ExactStates {
    type Item = Result<SirState, ModelError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.idx {
            0 => {
                self.idx = 1;
                return Some(Ok(SirState::new_unchecked(self.x, self.y, self.z0)));
            }
            1 => {
                self.x *= self.prefactor;
                self.y = (self.y / self.xi0) * self.prefactor;
            }
            _ => {
                let term = self.factors.next().expect("factor stream is infinite");
                self.x *= term.a;
                self.y *= term.a_tilde;
            }
        }
        self.idx += 1;
        if !(self.x.is_finite() && self.y.is_finite()) {
            return Some(Err(ModelError::NonFinite("exact solution accumulator")));
        }
        // Conservation defines z; clamping absorbs the downward roundoff of
        // the subtraction, since the true z never falls below z(t0) >= 0.
        let z = (self.n_total - self.x - self.y).max(0.0);
        Some(Ok(SirState::new_unchecked(self.x, self.y, z)))
    }
}

/// Evaluates the closed form at one grid index.
///
/// Index 0 returns the initial state bit for bit; index 1 applies only the
/// prefactor, matching the convention that an empty product equals 1.
pub fn exact_state(
    n: GridIndex,
    state0: SirState,
    params: Params,
) -> Result<SirState, ModelError> {
    let terms = ExactTerms::new(state0, params)?;
    let mut states = terms.states();
    let mut out = states.next().expect("index 0 always exists")?;
    for k in 1..=n.0 {
        out = states
            .next()
            .expect("state stream is infinite")
            .map_err(|e| e.at_index(k))?;
    }
    Ok(out)
}

/// Evaluates the closed form at every index 0..=n_max in one pass.
///
/// Each record comes from the same incremental accumulators a fresh
/// [`exact_state`] call would use, so the two agree bit for bit.
pub fn exact_trajectory(
    n_max: u64,
    state0: SirState,
    params: Params,
) -> Result<Trajectory, ModelError> {
    let terms = ExactTerms::new(state0, params)?;
    let mut traj = Trajectory::with_capacity(params, n_max as usize + 1);
    let mut t = params.t0();
    let mut states = terms.states();
    traj.push(0, t, states.next().expect("index 0 always exists")?);
    for k in 1..=n_max {
        let s = states
            .next()
            .expect("state stream is infinite")
            .map_err(|e| e.at_index(k))?;
        t *= params.q();
        traj.push(k, t, s);
    }
    Ok(traj)
}
