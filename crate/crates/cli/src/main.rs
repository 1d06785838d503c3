//! `quadtune`: simulate, tune and compare PD gains for the quadrotor model.
//!
//! Every line written to stdout is a space-separated list of `key=value`
//! pairs. Exit codes: 0 on success, 1 on I/O failure, 2 on configuration or
//! input errors, 3 when `simulate` produced an unstable rollout (the
//! trajectory file is still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quadtune_core::harness::{
    baseline_cost, compare_fronts, io, run_campaign, sensitivity_sweep, timing_comparison,
    Algorithm, ExperimentConfig,
};
use quadtune_core::pareto::normalized_hypervolume;
use quadtune_core::{evaluate_objectives, simulate, Error, PdGains};

#[derive(Parser)]
#[command(name = "quadtune", version, about = "Quadrotor PD gain tuning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Roll out one set of gains and print its cost.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Eight comma-separated gains: kp_phi,kd_phi,kp_theta,kd_theta,kp_psi,kd_psi,kp_z,kd_z.
        #[arg(long)]
        gains: Option<String>,
        /// Start at rest on the set-point.
        #[arg(long)]
        equilibrium: bool,
        #[arg(long, default_value = "trajectory.csv")]
        out: PathBuf,
    },
    /// Run a multi-trial campaign and write its CSV reports.
    Tune {
        #[arg(long)]
        config: Option<PathBuf>,
        /// bbo, pso, vebbo, vepso, nsbbo or nspso; overrides the config.
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Coverage matrix and hypervolumes of two or more front files.
    Metrics {
        /// Comma-separated front CSV paths.
        #[arg(long, value_delimiter = ',', required = true)]
        fronts: Vec<PathBuf>,
        #[arg(long, default_value = "metrics.csv")]
        out: PathBuf,
    },
    /// One campaign per value of a parameter.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// population, emigration, c1, c2 or w.
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// The same campaign under several worker counts.
    Timing {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "1,4")]
        workers: Vec<usize>,
        #[arg(long, default_value = "timing.csv")]
        out: PathBuf,
    },
}

enum Failure {
    Input(String),
    Io(String),
    Unstable,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(msg) => Failure::Io(msg),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            gains,
            equilibrium,
            out,
        } => cmd_simulate(config.as_deref(), gains.as_deref(), equilibrium, &out),
        Command::Tune {
            config,
            algorithm,
            trials,
            seed,
            workers,
            out,
        } => cmd_tune(
            config.as_deref(),
            algorithm.as_deref(),
            trials,
            seed,
            workers,
            &out,
        ),
        Command::Metrics { fronts, out } => cmd_metrics(&fronts, &out),
        Command::Sweep {
            config,
            axis,
            values,
            out,
        } => cmd_sweep(config.as_deref(), &axis, &values, &out),
        Command::Timing {
            config,
            workers,
            out,
        } => cmd_timing(config.as_deref(), &workers, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Unstable) => ExitCode::from(3),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load(path: Option<&Path>) -> Result<ExperimentConfig, Failure> {
    Ok(match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    })
}

fn parse_gains(text: &str) -> Result<PdGains, Failure> {
    let values = text
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Input(format!("bad gain token `{}`", tok.trim())))
        })
        .collect::<Result<Vec<f64>, Failure>>()?;
    let gains = PdGains::from_slice(&values).map_err(|_| {
        Failure::Input(format!(
            "expected {} gains, got {}",
            PdGains::DIM,
            values.len()
        ))
    })?;
    gains.validate()?;
    Ok(gains)
}

fn parent_dir(path: &Path) -> Result<(), Failure> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
        }
        _ => Ok(()),
    }
}

fn cmd_simulate(
    config: Option<&Path>,
    gains: Option<&str>,
    equilibrium: bool,
    out: &Path,
) -> Outcome {
    let cfg = load(config)?;
    let gains = match gains {
        Some(text) => parse_gains(text)?,
        None => cfg.gains.unwrap_or(PdGains::conventional()),
    };
    let mut settings = cfg.settings();
    if equilibrium {
        settings.init = settings.reference.equilibrium();
    }
    let traj = simulate(&gains, &cfg.drone, &settings)?;
    let f = evaluate_objectives(&traj, &settings.reference);
    let cost = quadtune_core::aggregate(&f, &cfg.weights());

    parent_dir(out)?;
    let file =
        std::fs::File::create(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    traj.write_csv(file)?;

    println!(
        "f1={} f2={} f3={} f4={} cost={cost}",
        f[0], f[1], f[2], f[3]
    );
    println!(
        "stable={} samples={} out={}",
        traj.stable,
        traj.len(),
        out.display()
    );
    if traj.stable {
        Ok(())
    } else {
        eprintln!("warning: rollout aborted as unstable");
        Err(Failure::Unstable)
    }
}

fn cmd_tune(
    config: Option<&Path>,
    algorithm: Option<&str>,
    trials: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: &Path,
) -> Outcome {
    let mut cfg = load(config)?;
    if let Some(name) = algorithm {
        cfg.experiment.algorithm = name.parse::<Algorithm>()?;
    }
    if let Some(n) = trials {
        cfg.experiment.trials = n;
    }
    if let Some(s) = seed {
        cfg.experiment.seed = s;
    }
    if let Some(w) = workers {
        cfg.experiment.workers = w;
    }
    cfg.validate()?;

    let report = run_campaign(&cfg)?;
    let baseline = baseline_cost(&cfg)?;
    std::fs::create_dir_all(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    std::fs::write(out.join("config.toml"), cfg.to_toml()?)
        .map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    let written = io::write_campaign(&report, out)?;

    let s = report.final_cost;
    println!(
        "algorithm={} trials={} seed={} workers={}",
        report.algorithm,
        report.trials.len(),
        cfg.experiment.seed,
        cfg.experiment.workers
    );
    println!(
        "best_cost={} mean_cost={} std_cost={} max_cost={} baseline_cost={baseline} improvement={}",
        s.min,
        s.mean,
        s.std,
        s.max,
        1.0 - s.mean / baseline
    );
    if let Some(front) = report.trials[0].front.as_ref() {
        println!(
            "front_size={} hypervolume={}",
            front.len(),
            normalized_hypervolume(front)?
        );
    }
    println!("seconds={}", report.total_seconds());
    for p in written {
        println!("wrote={}", p.display());
    }
    Ok(())
}

/// `front_nsbbo.csv` is labelled `nsbbo`; other files by their stem.
fn front_label(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    stem.strip_prefix("front_")
        .map(str::to_string)
        .unwrap_or(stem)
}

fn cmd_metrics(paths: &[PathBuf], out: &Path) -> Outcome {
    if paths.len() < 2 {
        return Err(Failure::Input(
            "metrics needs at least two front files".into(),
        ));
    }
    let mut fronts = Vec::with_capacity(paths.len());
    for p in paths {
        let front = io::read_front_file(p).map_err(|e| Failure::Input(e.to_string()))?;
        let mut label = front_label(p);
        if fronts.iter().any(|(l, _)| *l == label) {
            label = format!("{label}#{}", fronts.len() + 1);
        }
        fronts.push((label, front));
    }
    let cmp = compare_fronts(&fronts)?;
    parent_dir(out)?;
    io::write_rows_file(out, &io::metrics_rows(&cmp))?;

    let n = cmp.names.len();
    for a in 0..n {
        for b in 0..n {
            if let Some((covered, total)) = cmp.coverage[a][b] {
                println!(
                    "record=coverage a={} b={} covered={covered} total={total}",
                    cmp.names[a], cmp.names[b]
                );
            }
        }
    }
    for b in 0..n {
        let (covered, total) = cmp.dominated[b];
        println!(
            "record=dominated b={} covered={covered} total={total} percent={}",
            cmp.names[b],
            cmp.dominated_percent(b)
        );
    }
    for a in 0..n {
        println!(
            "record=hypervolume a={} value={}",
            cmp.names[a], cmp.hypervolume[a]
        );
    }
    println!("wrote={}", out.display());
    Ok(())
}

fn cmd_sweep(config: Option<&Path>, axis: &str, values: &[String], out: &Path) -> Outcome {
    let cfg = load(config)?;
    let rows = sensitivity_sweep(&cfg, axis, values)?;
    let axis_name = axis
        .parse::<quadtune_core::harness::SweepAxis>()?
        .to_string();
    parent_dir(out)?;
    io::write_rows_file(out, &io::sweep_rows(&axis_name, &rows))?;
    for r in &rows {
        println!(
            "axis={axis_name} value={} mean_cost={} std_cost={} min_cost={} max_cost={}",
            r.value, r.cost.mean, r.cost.std, r.cost.min, r.cost.max
        );
    }
    println!("wrote={}", out.display());
    Ok(())
}

fn cmd_timing(config: Option<&Path>, workers: &[usize], out: &Path) -> Outcome {
    let cfg = load(config)?;
    if workers.is_empty() || workers.contains(&0) {
        return Err(Failure::Input("worker counts must be >= 1".into()));
    }
    let rows = timing_comparison(&cfg, workers)?;
    parent_dir(out)?;
    io::write_rows_file(out, &io::timing_rows(&rows))?;
    for r in &rows {
        println!(
            "workers={} seconds={} evaluations_per_worker={}",
            r.workers, r.seconds, r.evaluations_per_worker
        );
    }
    let identical = rows
        .windows(2)
        .all(|w| w[0].final_costs == w[1].final_costs);
    let speedup = rows[0].seconds / rows[rows.len() - 1].seconds;
    println!(
        "identical={identical} speedup={speedup} cores={}",
        std::thread::available_parallelism().map_or(1, |n| n.get())
    );
    println!("wrote={}", out.display());
    Ok(())
}
