use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nslab::exact::{landau_residual, shell_samples};
use nslab::experiments::{self, ExperimentConfig, Outcome};
use nslab::Result;

#[derive(Parser)]
#[command(name = "nslab", version, about = "Navier-Stokes decay laboratory on a periodic box")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV curves and JSON reports.
    #[arg(long, global = true, default_value = "nslab-out")]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Perturbed-data comparison of two NS flows.
    Stability,
    /// NS against the mollified model.
    Mollified,
    /// NS against the hyperviscous model.
    Hyper,
    /// Kernel constants and semigroup gap rates.
    Kernels,
    /// Landau residuals and the point-force run.
    Landau,
    /// Weak-norm property suite.
    NormsSelftest,
    /// Self-similar decay from homogeneous data.
    Selfsim,
    /// Transform, projection and product suite.
    SpectralSelftest,
    /// Picard against ETD.
    SolverSelftest,
    /// Every experiment in turn.
    All,
    /// Prints the effective configuration as TOML.
    Config,
    /// Closed-form checks.
    #[command(subcommand)]
    Exact(Exact),
}

#[derive(Subcommand)]
enum Exact {
    /// Residual of the steady equations for one Landau solution, as CSV.
    Landau {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Also list every sample point.
        #[arg(long)]
        points: bool,
    },
}

type Runner = fn(&ExperimentConfig) -> Result<Outcome>;

const ALL: [(&str, Runner); 9] = [
    ("spectral-selftest", experiments::exp_spectral_selftest),
    ("norms-selftest", experiments::exp_norms_selftest),
    ("solver-selftest", experiments::exp_solver_selftest),
    ("kernels", experiments::exp_kernels),
    ("landau", experiments::exp_landau),
    ("selfsim", experiments::exp_selfsim),
    ("mollified", experiments::exp_mollified),
    ("hyper", experiments::exp_hyperviscous),
    ("stability", experiments::exp_stability),
];

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// Runs experiments, writes their files, prints tables; true if all passed.
fn run(cfg: &ExperimentConfig, out: &std::path::Path, runners: &[(&str, Runner)]) -> Result<bool> {
    let mut ok = true;
    let mut failures = Vec::new();
    for (name, f) in runners {
        let outcome = f(cfg)?;
        outcome.write(out)?;
        print!("{}", outcome.report.table());
        if !outcome.report.passed() {
            ok = false;
            for c in outcome.report.checks.iter().filter(|c| c.gating && !c.passed) {
                let crit = c.criterion.map(|i| i.to_string()).unwrap_or_else(|| "-".into());
                failures.push(format!(
                    "{name:<18} {crit:>9}  {}: {:.6e} ({})",
                    c.name, c.measured, c.threshold
                ));
            }
        }
    }
    if !failures.is_empty() {
        eprintln!("FAILED checks");
        eprintln!("{:<18} {:>9}  check", "experiment", "criterion");
        for f in failures {
            eprintln!("{f}");
        }
    }
    Ok(ok)
}

fn landau_csv(c: f64, samples: usize, h: f64, seed: u64, points: bool) -> Result<()> {
    let pts = shell_samples(samples, 0.5, 4.0, seed);
    let r = landau_residual(c, &pts, h)?;
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "c,h,samples,max,median,max_x,max_y,max_z,max_divergence,rounding_floor"
    )?;
    writeln!(
        out,
        "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
        r.c,
        r.h,
        r.samples,
        r.max,
        r.median,
        r.max_component[0],
        r.max_component[1],
        r.max_component[2],
        r.max_divergence,
        r.rounding_floor
    )?;
    if points {
        writeln!(out, "x,y,z,relative,res_x,res_y,res_z,divergence")?;
        for p in &r.points {
            writeln!(
                out,
                "{},{},{},{:e},{:e},{:e},{:e},{:e}",
                p.x[0], p.x[1], p.x[2], p.relative, p.components[0], p.components[1], p.components[2], p.divergence
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = load_config(&cli.common).and_then(|cfg| {
        let pick = |name: &str| ALL.iter().filter(|(n, _)| *n == name).copied().collect::<Vec<_>>();
        let out = &cli.common.out;
        match cli.command {
            Command::Stability => run(&cfg, out, &pick("stability")),
            Command::Mollified => run(&cfg, out, &pick("mollified")),
            Command::Hyper => run(&cfg, out, &pick("hyper")),
            Command::Kernels => run(&cfg, out, &pick("kernels")),
            Command::Landau => run(&cfg, out, &pick("landau")),
            Command::NormsSelftest => run(&cfg, out, &pick("norms-selftest")),
            Command::Selfsim => run(&cfg, out, &pick("selfsim")),
            Command::SpectralSelftest => run(&cfg, out, &pick("spectral-selftest")),
            Command::SolverSelftest => run(&cfg, out, &pick("solver-selftest")),
            Command::All => run(&cfg, out, &ALL),
            Command::Config => {
                print!("{}", cfg.to_toml()?);
                Ok(true)
            }
            Command::Exact(Exact::Landau { c, samples, h, points }) => {
                landau_csv(c, samples, h, cfg.seed, points)?;
                Ok(true)
            }
        }
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
