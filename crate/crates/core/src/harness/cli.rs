//! The `varreg` command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    defect_integral_check, modulus_estimate, rho_nu_estimate, rho_one, sample_perturbations, verify_equivalence,
    NormBall, DEFAULT_QUAD_POINTS,
};
use crate::error::{Result, VarregError};
use crate::forward::add_noise;
use crate::forward::DiagonalOperator;
use crate::grid::geometric;
use crate::sequences::{read_csv, write_csv, Coefficients, SequenceNorm};
use crate::tikhonov::{discrepancy_alpha, minimize, DiscrepancyOptions, DiscrepancyStatus, PenaltySpec};

use super::config::{ExperimentConfig, ProblemConfig};
use super::experiment::{derive_seeds, generate_truth, run_rate_experiment, RateReport, RowStatus};
use super::oracle::{prox_test_corpus, run_prox_test};
use super::output::{gnuplot_script, write_json, write_plot_csv, write_rows, write_trace};

#[derive(Parser, Debug)]
#[command(name = "varreg", version, about = "Tikhonov regularization on diagonal sequence-space models")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Problem or experiment JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output prefix: writes PREFIX.csv and PREFIX.json instead of stdout/stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one regularized problem from noisy data.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Regularization parameter; omit to use the discrepancy principle.
        #[arg(long)]
        alpha: Option<f64>,
        /// Noise level added to the exact data.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Observation CSV (j,k,value) replacing the simulated data.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 1.5)]
        c_d: f64,
        #[arg(long = "big-c-d", default_value_t = 2.0)]
        big_c_d: f64,
    },
    /// Image-space rate ρ_ν of the truth on the α grid.
    Rho {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
    },
    /// Defect σ(α) directly and through its integral representation.
    Defect {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_QUAD_POINTS)]
        quad_points: usize,
    },
    /// Check the rate / defect / source-condition constant chain.
    Equiv {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Lower bounds on the modulus of continuity over a δ range.
    Modulus {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-4)]
        delta_min: f64,
        #[arg(long, default_value_t = 1.0)]
        delta_max: f64,
        #[arg(long, default_value_t = 9)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },
    /// Convergence-rate experiment over a noise grid.
    Rates {
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check the solver against the brute-force oracle.
    ProxTest {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest accepted coordinate gap; larger gaps exit with status 2.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 for usage
/// and validation errors, 2 for numeric failures.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    configure_threads();
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numeric_failure() {
                2
            } else {
                1
            }
        }
    }
}

fn configure_threads() {
    let n = std::env::var("VARREG_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    if n > 0 {
        // a second call fails harmlessly when the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Where the CSV and JSON outputs go.
struct Sink {
    prefix: Option<PathBuf>,
}

impl Sink {
    fn path(&self, suffix: &str) -> Option<PathBuf> {
        self.prefix.as_ref().map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        })
    }

    fn csv(&self, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        match self.path(".csv") {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p)?);
                f(&mut w)?;
                w.flush()?;
                Ok(())
            }
            None => f(&mut io::stdout().lock()),
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<()> {
        match self.path(".json") {
            Some(p) => write_json(value, BufWriter::new(File::create(p)?)),
            None => write_json(value, io::stderr().lock()),
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Solve { common, alpha, delta, data, c_d, big_c_d } => {
            solve(&common, alpha, delta, data.as_deref(), c_d, big_c_d)
        }
        Command::Rho { common, nu } => {
            let (cfg, sink) = problem(&common)?;
            let (op, pen, x) = instance(&cfg)?;
            let est = rho_nu_estimate(&op, &pen, &x, nu, &cfg.alpha_grid()?)?;
            sink.csv(|w| write_trace(&est.samples, w))?;
            sink.json(&json!({
                "nu": nu,
                "rho_hat": est.rho_hat,
                "argmax_alpha": est.argmax_alpha,
                "certified_upper": est.certified_upper,
                "rho_one": rho_one(&op, &pen, &x)?,
            }))
        }
        Command::Defect { common, alpha, quad_points } => {
            let (cfg, sink) = problem(&common)?;
            let (op, pen, x) = instance(&cfg)?;
            let est = rho_nu_estimate(&op, &pen, &x, 1.0, &cfg.alpha_grid()?)?;
            let (direct, integral) = defect_integral_check(&op, &pen, &x, alpha, quad_points)?;
            sink.csv(|w| write_trace(&est.samples, w))?;
            sink.json(&json!({
                "alpha": alpha,
                "sigma_direct": direct,
                "sigma_integral": integral,
                "relative_gap": relative_gap(direct, integral),
            }))
        }
        Command::Equiv { common, nu, trials } => {
            let (cfg, sink) = problem(&common)?;
            let (op, pen, x) = instance(&cfg)?;
            let grid = cfg.alpha_grid()?;
            let zs = sample_perturbations(&x, trials, cfg.seed)?;
            let rep = verify_equivalence(&op, &pen, &x, nu, &grid, &zs)?;
            let est = rho_nu_estimate(&op, &pen, &x, nu, &grid)?;
            sink.csv(|w| write_trace(&est.samples, w))?;
            sink.json(&json!({
                "nu": rep.nu,
                "c1_grid": rep.c1_grid,
                "c1": rep.c1,
                "c2": rep.c2,
                "c3": rep.c3,
                "c1_back": rep.c1_back,
                "image_violation": rep.image_violation,
                "defect_violation": rep.defect_violation,
                "vsc_violation": rep.vsc_violation,
                "holds": rep.holds(1e-8),
            }))
        }
        Command::Modulus { common, delta_min, delta_max, count, trials } => {
            let (cfg, sink) = problem(&common)?;
            let op = cfg.operator()?;
            let ball = cfg.ball.as_ref().ok_or_else(|| VarregError::Config("modulus needs a \"ball\" entry".into()))?;
            let ball = NormBall { norm: ball.norm.build(op.index_set())?, radius: ball.radius };
            let error_norm = match &cfg.error_norm {
                Some(n) => n.build(op.index_set())?,
                None => SequenceNorm::Plain { p: 2.0 },
            };
            #[derive(Serialize)]
            struct Row {
                delta: f64,
                omega_lower: f64,
            }
            let rows = geometric(delta_min, delta_max, count)?
                .into_iter()
                .map(|delta| {
                    let est = modulus_estimate(&op, &ball, &error_norm, delta, trials, cfg.seed)?;
                    Ok(Row { delta, omega_lower: est.value })
                })
                .collect::<Result<Vec<_>>>()?;
            sink.csv(|w| write_rows(&rows, w))?;
            sink.json(&json!({ "radius": ball.radius, "trials": trials, "points": rows.len() }))
        }
        Command::Rates { common } => {
            let cfg = ExperimentConfig::load(&common.config)?;
            let prefix = common.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from));
            let report = run_rate_experiment(&cfg)?;
            write_rate_outputs(&report, prefix.as_deref())
        }
        Command::ProxTest { count, seed, tol, out } => {
            let corpus = prox_test_corpus(count, seed)?;
            let rep = run_prox_test(&corpus)?;
            println!("prox-test: {} instances, max gap {:e}", rep.instances, rep.max_gap);
            let sink = Sink { prefix: out };
            if sink.prefix.is_some() {
                sink.json(&rep)?;
            }
            if rep.max_gap > tol {
                return Err(VarregError::Divergence(format!(
                    "solver and oracle differ by {:e} on instance {} (tolerance {tol:e})",
                    rep.max_gap, rep.worst_instance
                )));
            }
            Ok(())
        }
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn problem(common: &Common) -> Result<(ProblemConfig, Sink)> {
    Ok((ProblemConfig::load(&common.config)?, Sink { prefix: common.out.clone() }))
}

fn instance(cfg: &ProblemConfig) -> Result<(DiagonalOperator, PenaltySpec, Coefficients)> {
    let op = cfg.operator()?;
    let pen = cfg.penalty(&op)?;
    let (truth_seed, _) = derive_seeds(cfg.seed, 0);
    let x = generate_truth(&cfg.truth, &op, truth_seed)?;
    Ok((op, pen, x))
}

fn solve(common: &Common, alpha: Option<f64>, delta: f64, data: Option<&Path>, c_d: f64, big_c_d: f64) -> Result<()> {
    let (cfg, sink) = problem(common)?;
    let (op, pen, x) = instance(&cfg)?;
    let g = match data {
        Some(p) => {
            let g = read_csv(File::open(p)?, op.index_set().d())?;
            if g.len() != op.len() {
                return Err(VarregError::LengthMismatch { expected: op.len(), found: g.len() });
            }
            x.with_values(g.into_values())?
        }
        None => {
            let (_, seeds) = derive_seeds(cfg.seed, 1);
            add_noise(&op.apply_forward(&x)?, delta, seeds[0])?.g
        }
    };
    let (sol, status) = match alpha {
        Some(a) => (minimize(&op, &pen, &g, a)?, "fixed".to_string()),
        None => {
            if !(delta > 0.0) {
                return Err(VarregError::invalid("the discrepancy principle needs --delta > 0 or an explicit --alpha"));
            }
            let out = discrepancy_alpha(&op, &pen, &g, delta, c_d, big_c_d, &DiscrepancyOptions::default())?;
            let status = match out.status {
                DiscrepancyStatus::Window => "window",
                DiscrepancyStatus::NoiseDominates => "noise_dominates",
            };
            (out.solution, status.to_string())
        }
    };
    sink.csv(|w| write_csv(&sol.x_hat, w))?;
    sink.json(&json!({
        "alpha": sol.alpha,
        "status": status,
        "residual": sol.residual,
        "penalty_value": sol.penalty_value,
        "objective": sol.objective(),
        "kkt_gap": sol.kkt_gap,
        "error_l2": x.sub(&sol.x_hat)?.norm(),
    }))
}

/// PREFIX.csv (rows), PREFIX.json (summary), PREFIX_plot.csv and PREFIX.gp,
/// or rows to stdout and the summary to stderr without a prefix.
fn write_rate_outputs(report: &RateReport, prefix: Option<&Path>) -> Result<()> {
    let summary = json!({
        "rule": report.rule,
        "fitted_slope": report.fitted_slope,
        "intercept": report.intercept,
        "theoretical_slope": report.theoretical_slope,
        "fitted_rows": report.fitted_rows,
        "plateau_rows": report.rows.iter().filter(|r| r.plateau).count(),
        "noise_dominated_rows": report.rows.iter().filter(|r| r.status == RowStatus::NoiseDominates).count(),
        "nu": report.nu,
        "rho": report.rho,
        "worst_image_excess": report.worst_image_excess(),
    });
    let sink = Sink { prefix: prefix.map(Path::to_path_buf) };
    sink.csv(|w| write_rows(&report.rows, w))?;
    sink.json(&summary)?;
    if let (Some(plot), Some(script)) = (sink.path("_plot.csv"), sink.path(".gp")) {
        write_plot_csv(report, BufWriter::new(File::create(&plot)?))?;
        let name = plot.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        std::fs::write(script, gnuplot_script(&name, &format!("{} rule", report.rule)))?;
    }
    Ok(())
}
