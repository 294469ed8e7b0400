use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use armform::kinematics::find_singularities;
use armform::sim::{run as sim_run, verify_run};
use armform_cli::emit::{emit, read_csv, rebuild_log};
use armform_cli::scenario::{builtin_case, load_scenario, ScenarioFile};
use armform_cli::CliError;

/// Distributed end-effector formation control of planar two-link arms:
/// closed-loop simulation, verification monitors, and singularity scans.
#[derive(Parser)]
#[command(name = "armform", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioSource {
    /// Built-in scenario: case1, case2, or case3.
    #[arg(long, conflicts_with = "config")]
    case: Option<String>,
    /// Scenario file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ScenarioSource {
    fn load(&self) -> Result<ScenarioFile, CliError> {
        match (&self.case, &self.config) {
            (Some(name), None) => builtin_case(name),
            (None, Some(path)) => load_scenario(path),
            _ => Err(CliError::Usage(
                "exactly one of --case or --config is required".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write trajectory.csv, summary.json,
    /// scenario.json (and SVG plots with --svg) into --out.
    Run {
        #[command(flatten)]
        source: ScenarioSource,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Override the integrator step (s).
        #[arg(long)]
        dt: Option<f64>,
        /// Override the horizon (s).
        #[arg(long = "t-final")]
        t_final: Option<f64>,
        /// Override the proportional gain.
        #[arg(long)]
        kp: Option<f64>,
        /// Override the damping gain.
        #[arg(long)]
        kd: Option<f64>,
        /// Override the logging stride (steps per sample).
        #[arg(long)]
        stride: Option<usize>,
        /// Also emit SVG plots.
        #[arg(long)]
        svg: bool,
    },
    /// Re-check a trajectory CSV against the run monitors. The scenario is
    /// taken from --case/--config, or from scenario.json beside the log.
    Verify {
        /// Trajectory CSV produced by `run`.
        #[arg(long)]
        log: PathBuf,
        #[command(flatten)]
        source: ScenarioSource,
    },
    /// Print the actuated-joint angles where a PA arm's reduced Jacobian
    /// becomes singular (one root per line), scanning (-pi, pi).
    Singularities {
        #[command(flatten)]
        source: ScenarioSource,
        /// Agent index, 1-based, as declared in the scenario.
        #[arg(long)]
        agent: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Run {
            source,
            out,
            dt,
            t_final,
            kp,
            kd,
            stride,
            svg,
        } => {
            let mut scenario = source.load()?;
            if let Some(v) = dt {
                scenario.sim.dt = v;
            }
            if let Some(v) = t_final {
                scenario.sim.t_final = v;
            }
            if let Some(v) = kp {
                scenario.gains.kp = v;
            }
            if let Some(v) = kd {
                scenario.gains.kd = v;
            }
            if let Some(v) = stride {
                scenario.sim.log_stride = v;
            }
            cmd_run(&scenario, &out, svg)
        }
        Command::Verify { log, source } => cmd_verify(&log, &source),
        Command::Singularities { source, agent } => {
            let scenario = source.load()?;
            cmd_singularities(&scenario, agent)
        }
    }
}

fn cmd_run(scenario: &ScenarioFile, out: &Path, svg: bool) -> Result<ExitCode, CliError> {
    let (mut network, config) = scenario.to_simulation()?;
    let log = sim_run(&mut network, &config)?;
    let (artifacts, report) = emit(scenario, &log, out, svg)?;
    let summary = log.summary();
    println!(
        "run complete: t = {} s, {} samples, final max|e| = {:.3e}, |xi(T)| = {:.3e}",
        summary.t_final,
        log.n_samples(),
        summary
            .final_edge_errors
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs())),
        summary.final_xi_norm,
    );
    print!("{report}");
    println!("wrote {}", artifacts.csv.display());
    println!("wrote {}", artifacts.summary.display());
    println!("wrote {}", artifacts.scenario.display());
    for p in &artifacts.svgs {
        println!("wrote {}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(log_path: &Path, source: &ScenarioSource) -> Result<ExitCode, CliError> {
    let scenario = match (&source.case, &source.config) {
        (None, None) => {
            let sidecar = log_path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .join("scenario.json");
            if !sidecar.exists() {
                return Err(CliError::Usage(format!(
                    "no scenario given and {} not found; pass --case or --config",
                    sidecar.display()
                )));
            }
            load_scenario(&sidecar)?
        }
        _ => source.load()?,
    };
    let csv = read_csv(log_path)?;
    let log = rebuild_log(&scenario, &csv)?;
    let report = verify_run(&log);
    print!("{report}");
    if report.all_pass() {
        println!("verified: all monitors pass");
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CliError::Verification("one or more monitors failed".into()))
    }
}

fn cmd_singularities(scenario: &ScenarioFile, agent: usize) -> Result<ExitCode, CliError> {
    let (network, _) = scenario.to_simulation()?;
    if agent == 0 || agent > network.n_agents() {
        return Err(CliError::Usage(format!(
            "agent {agent} out of range 1..={}",
            network.n_agents()
        )));
    }
    let a = network.agent(agent - 1);
    let branch = a.branch().ok_or_else(|| {
        CliError::Usage(format!(
            "agent {agent} is fully actuated; singularity scans apply to pa agents"
        ))
    })?;
    let roots = find_singularities(a.alpha(), a.params(), branch, (-PI, PI));
    for r in &roots {
        println!("{r}");
    }
    eprintln!(
        "{} singular point(s) of agent {agent} in (-pi, pi)",
        roots.len()
    );
    Ok(ExitCode::SUCCESS)
}
