//! Executes a validated [`RunConfig`]: produces files and a line-oriented
//! report for stdout, plus warnings for stderr.

use std::fmt::Write as _;
use std::path::Path;

use qsir_core::analysis::{
    check_theorem_condition, classify_limit, estimate_alpha, reproduction_number,
    Diagnostics, LimitEstimate,
};
use qsir_core::continuum::{integrate_with_stats, sample_at, ContinuumConfig};
use qsir_core::exact::exact_trajectory;
use qsir_core::recurrence::iterate;
use qsir_core::{GridIndex, ModelError, Trajectory, TrajectoryRecord};

use crate::config::{CliError, Mode, RunConfig};
use crate::csv_io::{write_atomic, write_csv};
use crate::svg::{render_chart, trajectory_chart, ChartSpec, Series, COMPARTMENT_COLORS};

/// Cap on closed-form steps taken while hunting for the susceptible limit.
const ALPHA_STEP_CAP: u64 = 1_000_000;

#[derive(Debug, Default)]
pub struct RunReport {
    /// Stdout lines, in order.
    pub lines: Vec<String>,
    /// Stderr warnings; never fatal.
    pub warnings: Vec<String>,
}

pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    match cfg.mode {
        Mode::Quantum | Mode::Exact | Mode::Continuous => trajectory_mode(cfg),
        Mode::Compare => compare_mode(cfg),
        Mode::Analyze => analyze_mode(cfg),
        Mode::Sweep => sweep_mode(cfg),
    }
}

fn csv_path(cfg: &RunConfig) -> &Path {
    cfg.out_csv
        .as_deref()
        .expect("validation requires out_csv for this mode")
}

fn push_trajectory_summary(report: &mut RunReport, traj: &Trajectory, path: &Path) {
    report.lines.push(format!(
        "wrote {} records to {}",
        traj.len(),
        path.display()
    ));
    if let Some(last) = traj.last() {
        report.lines.push(format!(
            "final state at t = {}: x = {}, y = {}, z = {}",
            last.t,
            last.state.x(),
            last.state.y(),
            last.state.z()
        ));
    }
}

fn trajectory_mode(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let mut report = RunReport::default();
    let (title, traj) = match cfg.mode {
        Mode::Quantum => (
            "quantum-grid trajectory",
            iterate(cfg.state0, cfg.params, cfg.n_steps)?,
        ),
        Mode::Exact => (
            "closed-form trajectory",
            exact_trajectory(cfg.n_steps, cfg.state0, cfg.params)?,
        ),
        Mode::Continuous => {
            let t_end = cfg.t_end.expect("validation requires t_end");
            let ccfg = ContinuumConfig::new(cfg.dt, t_end)?;
            let (traj, clamped) =
                integrate_with_stats(cfg.state0, ccfg, cfg.params, cfg.params.t0())?;
            if clamped > 0 {
                report.warnings.push(format!(
                    "clamped {clamped} negative component undershoots during integration"
                ));
            }
            ("continuous-time trajectory", traj)
        }
        _ => unreachable!("trajectory_mode handles trajectory modes only"),
    };
    let path = csv_path(cfg);
    write_csv(&traj, path)?;
    push_trajectory_summary(&mut report, &traj, path);
    if let Some(svg) = &cfg.out_svg {
        render_chart(&trajectory_chart(title, &[(cfg.mode.name(), &traj)]), svg)?;
        report.lines.push(format!("wrote chart to {}", svg.display()));
    }
    Ok(report)
}

const COMPARE_HEADER: &str = "n,t,x_quantum,y_quantum,z_quantum,x_exact,y_exact,\
z_exact,x_continuous,y_continuous,z_continuous,dev_exact,dev_continuous";

fn compare_mode(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let mut report = RunReport::default();
    let quantum = iterate(cfg.state0, cfg.params, cfg.n_steps)?;
    let exact = exact_trajectory(cfg.n_steps, cfg.state0, cfg.params)?;
    let times: Vec<f64> = quantum.records().iter().map(|r| r.t).collect();
    let (continuous, clamped) =
        sample_at(cfg.state0, cfg.params, cfg.dt, cfg.params.t0(), &times)?;
    if clamped > 0 {
        report.warnings.push(format!(
            "clamped {clamped} negative component undershoots during integration"
        ));
    }

    let n_total = cfg.state0.total_population();
    let mut table = String::with_capacity(128 * (quantum.len() + 2));
    table.push_str(COMPARE_HEADER);
    table.push('\n');
    let mut max_dev_exact = 0.0f64;
    let mut max_dev_continuous = 0.0f64;
    for (i, qr) in quantum.records().iter().enumerate() {
        let es = exact.records()[i].state;
        let cs = continuous[i];
        let dev_e = qr.state.max_component_gap(&es) / n_total;
        let dev_c = qr.state.max_component_gap(&cs) / n_total;
        max_dev_exact = max_dev_exact.max(dev_e);
        max_dev_continuous = max_dev_continuous.max(dev_c);
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            qr.n,
            qr.t,
            qr.state.x(),
            qr.state.y(),
            qr.state.z(),
            es.x(),
            es.y(),
            es.z(),
            cs.x(),
            cs.y(),
            cs.z(),
            dev_e,
            dev_c
        );
    }
    let summary_exact = format!("max_rel_dev_quantum_exact = {max_dev_exact}");
    let summary_continuous =
        format!("max_rel_dev_quantum_continuous = {max_dev_continuous}");
    let _ = writeln!(table, "# {summary_exact}");
    let _ = writeln!(table, "# {summary_continuous}");

    let path = csv_path(cfg);
    write_atomic(path, table.as_bytes())?;
    report
        .lines
        .push(format!("wrote {} rows to {}", quantum.len(), path.display()));
    report.lines.push(summary_exact);
    report.lines.push(summary_continuous);

    if let Some(svg) = &cfg.out_svg {
        let crecords: Vec<TrajectoryRecord> = continuous
            .iter()
            .zip(&times)
            .enumerate()
            .map(|(i, (state, &t))| TrajectoryRecord {
                n: GridIndex(i as u64),
                t,
                state: *state,
            })
            .collect();
        let ctraj = Trajectory::from_parts(cfg.params, crecords)?;
        let chart = trajectory_chart(
            "quantum vs closed form vs continuous",
            &[
                ("quantum", &quantum),
                ("exact", &exact),
                ("continuous", &ctraj),
            ],
        );
        render_chart(&chart, svg)?;
        report.lines.push(format!("wrote chart to {}", svg.display()));
    }
    Ok(report)
}

fn describe_condition(diag: &Diagnostics, horizon: u64) -> String {
    if diag.condition_holds() {
        return format!("decay condition a_tilde < 1 over horizon {horizon}: holds");
    }
    let viol = diag.violations();
    let max_val = viol
        .iter()
        .map(|&i| diag.a_tilde_seq[i])
        .fold(f64::NEG_INFINITY, f64::max);
    format!(
        "decay condition a_tilde < 1 over horizon {horizon}: fails at {} of {} \
         indices (first {}, last {}, max a_tilde = {})",
        viol.len(),
        diag.horizon,
        viol.first().copied().unwrap_or(0),
        viol.last().copied().unwrap_or(0),
        max_val
    )
}

fn diagnostics_csv(diag: &Diagnostics) -> String {
    let mut out = String::with_capacity(64 * (diag.horizon + 1));
    out.push_str("i,xi,a,a_tilde\n");
    for i in 0..diag.horizon {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            i, diag.xi_seq[i], diag.a_seq[i], diag.a_tilde_seq[i]
        );
    }
    out
}

fn diagnostics_chart(diag: &Diagnostics) -> ChartSpec {
    let indexed = |vals: &[f64]| {
        vals.iter()
            .enumerate()
            .map(|(i, &v)| (i as f64, v))
            .collect::<Vec<_>>()
    };
    let series = vec![
        Series {
            label: "xi".to_string(),
            color: COMPARTMENT_COLORS[0].to_string(),
            dash: String::new(),
            points: indexed(&diag.xi_seq),
        },
        Series {
            label: "a".to_string(),
            color: COMPARTMENT_COLORS[1].to_string(),
            dash: String::new(),
            points: indexed(&diag.a_seq),
        },
        Series {
            label: "a_tilde".to_string(),
            color: COMPARTMENT_COLORS[2].to_string(),
            dash: String::new(),
            points: indexed(&diag.a_tilde_seq),
        },
    ];
    ChartSpec {
        title: "closed-form factor sequences".to_string(),
        x_label: "i".to_string(),
        y_label: "factor value".to_string(),
        series,
    }
}

fn analyze_mode(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let mut report = RunReport::default();
    report
        .lines
        .push(format!("R0 = {}", reproduction_number(cfg.params)));
    report
        .lines
        .push(format!("classification: {}", classify_limit(cfg.params)));

    match check_theorem_condition(cfg.params, cfg.state0, cfg.horizon as usize) {
        Ok(diag) => {
            report.lines.push(describe_condition(&diag, cfg.horizon));
            report.lines.push(format!(
                "xi strictly decreasing: {}; xi above one: {}; a strictly decreasing: {}",
                diag.xi_decreasing, diag.xi_above_one, diag.a_decreasing
            ));
            if let Some(csv) = &cfg.out_csv {
                write_atomic(csv, diagnostics_csv(&diag).as_bytes())?;
                report.lines.push(format!(
                    "wrote factor sequences to {}",
                    csv.display()
                ));
            }
            if let Some(svg) = &cfg.out_svg {
                render_chart(&diagnostics_chart(&diag), svg)?;
                report.lines.push(format!("wrote chart to {}", svg.display()));
            }
        }
        Err(ModelError::ZeroInfected) => {
            if cfg.out_csv.is_some() || cfg.out_svg.is_some() {
                return Err(ModelError::ZeroInfected.into());
            }
            report.lines.push(
                "factor diagnostics: undefined (no infected individuals at t0)"
                    .to_string(),
            );
        }
        Err(e) => return Err(e.into()),
    }

    let est = estimate_alpha(cfg.params, cfg.state0, cfg.tol, ALPHA_STEP_CAP);
    report.lines.push(describe_alpha(&est));
    if !est.converged {
        report.warnings.push(format!(
            "alpha estimate did not settle within {} steps",
            est.steps_used
        ));
    }
    Ok(report)
}

fn describe_alpha(est: &LimitEstimate) -> String {
    if est.converged {
        format!(
            "alpha = {} (converged after {} steps, residual = {})",
            est.alpha, est.steps_used, est.residual
        )
    } else {
        format!(
            "alpha = {} (not converged after {} steps, residual = {})",
            est.alpha, est.steps_used, est.residual
        )
    }
}

fn sweep_mode(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let mut report = RunReport::default();
    let mut table = String::from("q,alpha\n");
    let mut points = Vec::with_capacity(cfg.q_list.len());
    for &q in &cfg.q_list {
        let params = cfg.params.with_q(q)?;
        let est = estimate_alpha(params, cfg.state0, cfg.tol, ALPHA_STEP_CAP);
        if !est.converged {
            report.warnings.push(format!(
                "alpha estimate for q = {q} did not settle within {} steps",
                est.steps_used
            ));
        }
        report.lines.push(format!("q = {} -> alpha = {}", q, est.alpha));
        let _ = writeln!(table, "{},{}", q, est.alpha);
        points.push((q, est.alpha));
    }
    let path = csv_path(cfg);
    write_atomic(path, table.as_bytes())?;
    report.lines.push(format!(
        "wrote {} sweep rows to {}",
        cfg.q_list.len(),
        path.display()
    ));
    if let Some(svg) = &cfg.out_svg {
        let chart = ChartSpec {
            title: "susceptible limit vs grid ratio".to_string(),
            x_label: "q".to_string(),
            y_label: "alpha".to_string(),
            series: vec![Series {
                label: "alpha".to_string(),
                color: COMPARTMENT_COLORS[0].to_string(),
                dash: String::new(),
                points,
            }],
        };
        render_chart(&chart, svg)?;
        report.lines.push(format!("wrote chart to {}", svg.display()));
    }
    Ok(report)
}
