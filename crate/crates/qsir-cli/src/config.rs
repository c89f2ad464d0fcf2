//! Flat key=value run configuration.
//!
//! One assignment per line, `#` starts a comment, later assignments win.
//! Recognized keys: b, c, q, t0, x0, y0, z0, mode, n_steps, t_end, dt,
//! q_list, out_csv, out_svg. Command-line flags override document keys.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qsir_core::{ModelError, Params, SirState};

/// What a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Step the recurrence along the grid and write the trajectory.
    Quantum,
    /// Evaluate the closed-form solution along the grid.
    Exact,
    /// Integrate the continuous-time system with RK4.
    Continuous,
    /// Join quantum, exact, and continuous trajectories with deviations.
    Compare,
    /// Report R0, limit class, factor diagnostics, and the alpha estimate.
    Analyze,
    /// Estimate alpha for each q in q_list.
    Sweep,
}

impl Mode {
    pub(crate) fn name(self) -> &'static str {
        match self {
            Mode::Quantum => "quantum",
            Mode::Exact => "exact",
            Mode::Continuous => "continuous",
            Mode::Compare => "compare",
            Mode::Analyze => "analyze",
            Mode::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quantum" => Ok(Mode::Quantum),
            "exact" => Ok(Mode::Exact),
            "continuous" => Ok(Mode::Continuous),
            "compare" => Ok(Mode::Compare),
            "analyze" => Ok(Mode::Analyze),
            "sweep" => Ok(Mode::Sweep),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Fully validated run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Params,
    pub state0: SirState,
    pub mode: Mode,
    pub n_steps: u64,
    /// End time for continuous integration. Required by that mode only.
    pub t_end: Option<f64>,
    pub dt: f64,
    pub q_list: Vec<f64>,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    /// Indices inspected by the analyze diagnostics.
    pub horizon: u64,
    /// Relative tolerance for alpha convergence.
    pub tol: f64,
}

/// Command-line values that take precedence over document keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub n_steps: Option<u64>,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub horizon: Option<u64>,
    pub tol: Option<f64>,
}

/// Errors carried to the process exit status: parse and validation failures
/// exit 2, model failures 3, IO failures 4.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

pub(crate) fn io_error(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Default)]
struct RawDoc {
    b: Option<f64>,
    c: Option<f64>,
    q: Option<f64>,
    t0: Option<f64>,
    x0: Option<f64>,
    y0: Option<f64>,
    z0: Option<f64>,
    mode: Option<Mode>,
    n_steps: Option<u64>,
    t_end: Option<f64>,
    dt: Option<f64>,
    q_list: Option<Vec<f64>>,
    out_csv: Option<PathBuf>,
    out_svg: Option<PathBuf>,
}

fn number(key: &str, value: &str, lineno: usize) -> Result<f64, CliError> {
    value.parse().map_err(|_| {
        CliError::Parse(format!(
            "line {lineno}: invalid number for `{key}`: `{value}`"
        ))
    })
}

fn integer(key: &str, value: &str, lineno: usize) -> Result<u64, CliError> {
    value.parse().map_err(|_| {
        CliError::Parse(format!(
            "line {lineno}: invalid integer for `{key}`: `{value}`"
        ))
    })
}

fn number_list(key: &str, value: &str, lineno: usize) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|item| !item.is_empty())
        .map(|item| number(key, item, lineno))
        .collect()
}

fn missing(key: &str) -> CliError {
    CliError::Parse(format!("missing required key `{key}`"))
}

fn invalid(e: ModelError) -> CliError {
    CliError::Validation(e.to_string())
}

/// Parses and validates a config document with no overrides.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_with(text, &Overrides::default())
}

/// Parses a config document, applies `over`, and validates the result.
pub fn parse_config_with(text: &str, over: &Overrides) -> Result<RunConfig, CliError> {
    let mut doc = RawDoc::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Parse(format!("line {lineno}: expected key=value, got `{line}`"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(CliError::Parse(format!(
                "line {lineno}: empty value for `{key}`"
            )));
        }
        match key {
            "b" => doc.b = Some(number(key, value, lineno)?),
            "c" => doc.c = Some(number(key, value, lineno)?),
            "q" => doc.q = Some(number(key, value, lineno)?),
            "t0" => doc.t0 = Some(number(key, value, lineno)?),
            "x0" => doc.x0 = Some(number(key, value, lineno)?),
            "y0" => doc.y0 = Some(number(key, value, lineno)?),
            "z0" => doc.z0 = Some(number(key, value, lineno)?),
            "t_end" => doc.t_end = Some(number(key, value, lineno)?),
            "dt" => doc.dt = Some(number(key, value, lineno)?),
            "n_steps" => doc.n_steps = Some(integer(key, value, lineno)?),
            "mode" => {
                doc.mode = Some(value.parse().map_err(|e| {
                    CliError::Parse(format!("line {lineno}: {e}"))
                })?)
            }
            "q_list" => doc.q_list = Some(number_list(key, value, lineno)?),
            "out_csv" => doc.out_csv = Some(PathBuf::from(value)),
            "out_svg" => doc.out_svg = Some(PathBuf::from(value)),
            other => {
                return Err(CliError::Parse(format!(
                    "line {lineno}: unknown key `{other}`"
                )))
            }
        }
    }

    let params = Params::new(
        doc.b.ok_or_else(|| missing("b"))?,
        doc.c.ok_or_else(|| missing("c"))?,
        doc.q.ok_or_else(|| missing("q"))?,
        doc.t0.ok_or_else(|| missing("t0"))?,
    )
    .map_err(invalid)?;
    let state0 = SirState::new(
        doc.x0.ok_or_else(|| missing("x0"))?,
        doc.y0.ok_or_else(|| missing("y0"))?,
        doc.z0.unwrap_or(0.0),
    )
    .map_err(invalid)?;
    let mode = over
        .mode
        .or(doc.mode)
        .ok_or_else(|| missing("mode"))?;

    let cfg = RunConfig {
        params,
        state0,
        mode,
        n_steps: over.n_steps.or(doc.n_steps).unwrap_or(200),
        t_end: doc.t_end,
        dt: doc.dt.unwrap_or(0.01),
        q_list: doc.q_list.unwrap_or_default(),
        out_csv: over.out_csv.clone().or(doc.out_csv),
        out_svg: over.out_svg.clone().or(doc.out_svg),
        horizon: over.horizon.unwrap_or(1000),
        tol: over.tol.unwrap_or(1e-8),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let fail = |msg: &str| Err(CliError::Validation(msg.to_string()));
    if !cfg.tol.is_finite() || cfg.tol <= 0.0 {
        return fail("tol must be positive and finite");
    }
    if cfg.horizon == 0 {
        return fail("horizon must be at least 1");
    }
    let needs_dt = matches!(cfg.mode, Mode::Continuous | Mode::Compare);
    if needs_dt && !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return fail("dt must be positive and finite");
    }
    if cfg.mode == Mode::Continuous {
        match cfg.t_end {
            None => return fail("continuous mode requires t_end"),
            Some(t_end) if !t_end.is_finite() => return fail("t_end must be finite"),
            Some(t_end) if t_end <= cfg.params.t0() => {
                return fail("t_end must exceed t0")
            }
            Some(_) => {}
        }
    }
    if cfg.mode == Mode::Sweep {
        if cfg.q_list.is_empty() {
            return fail("sweep mode requires a nonempty q_list");
        }
        if cfg.q_list.iter().any(|&q| !q.is_finite() || q <= 1.0) {
            return fail("q_list values must exceed 1");
        }
    }
    if cfg.mode != Mode::Analyze && cfg.out_csv.is_none() {
        return Err(CliError::Validation(format!(
            "{} mode requires an output path: set out_csv or pass --out-csv",
            cfg.mode
        )));
    }
    Ok(())
}
