//! Artifact emission (trajectory CSV, summary JSON) and the inverse path:
//! rebuilding a verifiable log from a CSV plus its scenario.
//!
//! CSV column contract, in order: `t`, then per agent i (1-based)
//! `q{i}_1, q{i}_2, dq{i}_1, dq{i}_2, x{i}, y{i}, u{i}_1, u{i}_2`, then
//! `e_1..e_|E|`, then `xi_norm`, `U`. Values are written with Rust's
//! shortest-roundtrip float formatting, so a re-parsed file reproduces the
//! run bit for bit and two identical runs emit byte-identical files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;

use armform::control::ActuationMode;
use armform::dynamics::ManipulatorParams;
use armform::kinematics::{fk, BasePose, HolonomicBranch};
use armform::sim::{verify_run, AgentTrack, TrajectoryLog, VerificationReport};
use armform::JointState;

use crate::scenario::{Mode, ScenarioFile};
use crate::svg;
use crate::CliError;

/// Paths of everything a `run` invocation wrote.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub scenario: PathBuf,
    pub svgs: Vec<PathBuf>,
}

pub fn csv_header(n_agents: usize, n_edges: usize) -> String {
    let mut cols = vec!["t".to_string()];
    for i in 1..=n_agents {
        for name in [
            "q{}_1", "q{}_2", "dq{}_1", "dq{}_2", "x{}", "y{}", "u{}_1", "u{}_2",
        ] {
            cols.push(name.replace("{}", &i.to_string()));
        }
    }
    for k in 1..=n_edges {
        cols.push(format!("e_{k}"));
    }
    cols.push("xi_norm".into());
    cols.push("U".into());
    cols.join(",")
}

pub fn write_csv(log: &TrajectoryLog, path: &Path) -> Result<(), CliError> {
    let file = fs::File::create(path)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| CliError::Io(format!("writing {}: {e}", path.display()));
    writeln!(w, "{}", csv_header(log.n_agents(), log.n_edges())).map_err(io_err)?;
    for s in 0..log.n_samples() {
        write!(w, "{}", log.times[s]).map_err(io_err)?;
        for track in &log.tracks {
            write!(
                w,
                ",{},{},{},{},{},{},{},{}",
                track.q1[s],
                track.q2[s],
                track.dq1[s],
                track.dq2[s],
                track.x[s],
                track.y[s],
                track.u1[s],
                track.u2[s]
            )
            .map_err(io_err)?;
        }
        for series in &log.edge_e {
            write!(w, ",{}", series[s]).map_err(io_err)?;
        }
        writeln!(w, ",{},{}", log.xi_norm[s], log.lyapunov[s]).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Raw parsed CSV: header names plus row-major values.
pub struct CsvData {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_csv(path: &Path) -> Result<CsvData, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Verification(format!("{}: empty file", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let row = row.map_err(|e| {
            CliError::Verification(format!("{}:{}: bad number: {e}", path.display(), n + 2))
        })?;
        if row.len() != header.len() {
            return Err(CliError::Verification(format!(
                "{}:{}: {} fields, header has {}",
                path.display(),
                n + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok(CsvData { header, rows })
}

/// Rebuild a monitor-complete trajectory log from a CSV and the scenario it
/// came from. Logged series (q, qdot, x, u, e, xi_norm, U) are adopted from
/// the file; the monitor series (Jacobian margins, holonomy drift, momentum
/// residual) are recomputed from the joint series through the scenario's
/// plant. The logged end-effector columns are cross-checked against forward
/// kinematics so a CSV cannot be verified against the wrong scenario.
pub fn rebuild_log(scenario: &ScenarioFile, csv: &CsvData) -> Result<TrajectoryLog, CliError> {
    let n = scenario.n_agents();
    let n_edges = scenario.n_edges();
    let expected_cols = 1 + 8 * n + n_edges + 2;
    if csv.header.len() != expected_cols {
        return Err(CliError::Verification(format!(
            "log has {} columns, scenario implies {expected_cols}",
            csv.header.len()
        )));
    }
    if csv.header.join(",") != csv_header(n, n_edges) {
        return Err(CliError::Verification(
            "log header does not match the column contract".into(),
        ));
    }
    if csv.rows.is_empty() {
        return Err(CliError::Verification("log has no samples".into()));
    }

    let n_samples = csv.rows.len();
    let col = |j: usize| csv.rows.iter().map(move |r| r[j]);
    let mut log = TrajectoryLog {
        times: col(0).collect(),
        modes: scenario
            .agents
            .iter()
            .map(|a| ActuationMode::from(a.mode))
            .collect(),
        tracks: Vec::with_capacity(n),
        edge_e: (0..n_edges).map(|k| col(1 + 8 * n + k).collect()).collect(),
        xi_norm: col(1 + 8 * n + n_edges).collect(),
        lyapunov: col(1 + 8 * n + n_edges + 1).collect(),
    };

    for (i, spec) in scenario.agents.iter().enumerate() {
        let base = 1 + 8 * i;
        let p = spec.params;
        let params = ManipulatorParams::new(p.m1, p.m2, p.i1, p.i2, p.len1, p.len2, p.com1, p.com2)
            .map_err(|e| CliError::Scenario(format!("agents[{}].params: {e}", i + 1)))?;
        let alpha = params.alphas();
        let mut track = AgentTrack {
            q1: col(base).collect(),
            q2: col(base + 1).collect(),
            dq1: col(base + 2).collect(),
            dq2: col(base + 3).collect(),
            x: col(base + 4).collect(),
            y: col(base + 5).collect(),
            u1: col(base + 6).collect(),
            u2: col(base + 7).collect(),
            ..Default::default()
        };

        let base_pose = BasePose::from(spec.base);
        for s in 0..n_samples {
            let q = nalgebra::Vector2::new(track.q1[s], track.q2[s]);
            let x = fk(&params, &q, &base_pose);
            if (x[0] - track.x[s]).abs() > 1e-9 || (x[1] - track.y[s]).abs() > 1e-9 {
                return Err(CliError::Verification(format!(
                    "sample {s}: logged end-effector of agent {} is inconsistent with the \
                     scenario's kinematics (log ({}, {}), expected ({}, {}))",
                    i + 1,
                    track.x[s],
                    track.y[s],
                    x[0],
                    x[1]
                )));
            }
            track.jac_margin.push(match spec.mode {
                Mode::Fa => armform::kinematics::jacobian(&params, &q)
                    .determinant()
                    .abs(),
                Mode::Pa => {
                    let jb = armform::kinematics::reduced_jacobian(&alpha, &params, &q);
                    (jb[0] * jb[1]).abs()
                }
            });
        }

        if spec.mode == Mode::Pa {
            let q0 = JointState::new(track.q1[0], track.q2[0], track.dq1[0], track.dq2[0]);
            let branch = HolonomicBranch::new(&alpha, &q0)
                .map_err(|e| CliError::Verification(format!("agent {}: {e}", i + 1)))?;
            let mut drift = Vec::with_capacity(n_samples);
            let mut residual = Vec::with_capacity(n_samples);
            for s in 0..n_samples {
                drift.push((track.q1[s] - branch.constrained_q1(track.q2[s])).abs());
                let m = alpha.mass_matrix(track.q2[s]);
                residual.push((m[(0, 0)] * track.dq1[s] + m[(0, 1)] * track.dq2[s]).abs());
            }
            track.holonomy_drift = Some(drift);
            track.momentum_residual = Some(residual);
        }
        log.tracks.push(track);
    }
    Ok(log)
}

pub fn summary_json(
    scenario: &ScenarioFile,
    log: &TrajectoryLog,
    report: &VerificationReport,
) -> serde_json::Value {
    let s = log.summary();
    json!({
        "t_final": s.t_final,
        "final_edge_errors": s.final_edge_errors,
        "final_q": s.final_q,
        "final_xi_norm": s.final_xi_norm,
        "final_lyapunov": s.final_lyapunov,
        "max_holonomy_drift": s.max_holonomy_drift.iter()
            .map(|&(i, v)| json!({"agent": i + 1, "value": v})).collect::<Vec<_>>(),
        "max_momentum_residual": s.max_momentum_residual.iter()
            .map(|&(i, v)| json!({"agent": i + 1, "value": v})).collect::<Vec<_>>(),
        "min_jacobian_margin": s.min_jacobian_margin.iter().enumerate()
            .map(|(i, &v)| json!({
                "agent": i + 1,
                "kind": match scenario.agents[i].mode {
                    Mode::Fa => "det_J",
                    Mode::Pa => "jbar1_jbar2",
                },
                "value": v,
            })).collect::<Vec<_>>(),
        "u_monotonicity_violations": s.u_monotonicity_violations,
        "margin_flagged": s.min_jacobian_margin.iter().any(|&v| v < armform::sim::JACOBIAN_MARGIN_MIN),
        "monitors": report.monitors.iter()
            .map(|m| json!({"name": m.name, "pass": m.pass, "detail": m.detail}))
            .collect::<Vec<_>>(),
        "all_monitors_pass": report.all_pass(),
    })
}

/// Write every artifact of a completed run into `out_dir`.
pub fn emit(
    scenario: &ScenarioFile,
    log: &TrajectoryLog,
    out_dir: &Path,
    with_svg: bool,
) -> Result<(RunArtifacts, VerificationReport), CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", out_dir.display())))?;

    let csv = out_dir.join("trajectory.csv");
    write_csv(log, &csv)?;

    let scenario_path = out_dir.join("scenario.json");
    let scenario_text = serde_json::to_string_pretty(scenario).expect("scenario serializes");
    fs::write(&scenario_path, scenario_text + "\n")
        .map_err(|e| CliError::Io(format!("writing {}: {e}", scenario_path.display())))?;

    let report = verify_run(log);
    let summary = out_dir.join("summary.json");
    let summary_text =
        serde_json::to_string_pretty(&summary_json(scenario, log, &report)).expect("json");
    fs::write(&summary, summary_text + "\n")
        .map_err(|e| CliError::Io(format!("writing {}: {e}", summary.display())))?;

    let mut svgs = Vec::new();
    if with_svg {
        svgs = svg::emit_plots(scenario, log, out_dir)?;
    }
    Ok((
        RunArtifacts {
            csv,
            summary,
            scenario: scenario_path,
            svgs,
        },
        report,
    ))
}
