//! `teichkit` command line. Exit codes: 0 pass, 1 property failure,
//! 2 usage or input error.

mod commands;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use teichkit::RunConfig;

#[derive(Parser)]
#[command(name = "teichkit", version, about = "Univalent disk maps, Bers-type embeddings, welding and chart atlases")]
struct Cli {
    /// Run configuration (TOML, or JSON by `.json` extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Series truncation of reported differentials.
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    /// Relative tolerance of the sup-norm refinement.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized corpora.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Pre-Schwarzian, Schwarzian, β, β̂, χ and their norms for a map file.
    Analyze { map: PathBuf },
    /// Distances d_s, d_ps, d_o between two map files.
    Distance {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        metric: MetricArg,
    },
    /// Weld a circle map: finds (f, g) with g(e^{iγ}) = f on the circle.
    Weld {
        #[arg(long)]
        gamma: PathBuf,
        /// log |f'(0)|
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        m: f64,
        /// Coefficients kept in each of f and g.
        #[arg(long, default_value_t = 64)]
        terms: usize,
    },
    /// Recover (γ, m) from a map f.
    Unweld {
        #[arg(long)]
        f: PathBuf,
        /// Boundary nodes of the exterior solver.
        #[arg(long, default_value_t = 512)]
        nodes: usize,
        /// Fourier modes of the returned circle map.
        #[arg(long, default_value_t = 64)]
        modes: usize,
    },
    /// Default charts for a point configuration `{"points": [[re, im] | "inf", …]}`.
    Chart {
        #[arg(long)]
        points: PathBuf,
        /// Only this chart.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Pairwise disjointness of closed images. Input is either
    /// `{"charts": […], "maps": […]}` or `{"points": […], "maps": […]}`
    /// (default charts). Exits 1 unless every pair passes.
    Nonoverlap {
        tuple: PathBuf,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// ζ'∘ζ⁻¹∘ψ for two chart files at the same point.
    Transition {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        /// Also report the complex-linearity residual along φ = 1 and φ = z.
        #[arg(long)]
        check: bool,
    },
    /// Gâteaux difference quotients along a curve file, as CSV with columns
    /// t,residual,second_order_lhs,observed_constant,bound_holds and a final
    /// `# summary` comment line. Exits 1 if the check fails.
    Gateaux {
        curve: PathBuf,
        /// Möbius left map `{"a":…,"b":…,"c":…,"d":…}`; default w/(1 − w).
        #[arg(long)]
        h: Option<PathBuf>,
    },
    /// Run a property suite: identities, metrics, bounds, curves, welding,
    /// atlas or all. Prints a JSON manifest; exits 1 on any failure.
    Verify {
        suite: String,
        /// JSON array of maps replacing the seeded corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Emit SVG or CSV artifacts for a map or welding pair.
    Plot {
        object: PathBuf,
        #[arg(long, value_enum, default_value = "boundary")]
        kind: PlotKind,
        /// Circle map for `seam`.
        #[arg(long)]
        gamma: Option<PathBuf>,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MetricArg {
    S,
    Ps,
    O,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PlotKind {
    /// SVG path of f(S¹) for a map file.
    Boundary,
    /// CSV theta,re,im of f(e^{iθ}) for a map file.
    Polyline,
    /// CSV r,theta,x,y,weighted_modulus of (1 − |z|²)|f''/f'| on the initial norm grid.
    Heat,
    /// SVG of f(S¹) and g(S¹) for a welding pair file.
    Welding,
    /// CSV theta,f_re,f_im,g_re,g_im,residual along the seam (needs --gamma).
    Seam,
}

/// Result of a command that may report a property failure.
pub enum Status {
    Pass,
    Fail,
}

fn run_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.n {
        cfg.truncation = n;
    }
    if let Some(t) = cli.tol {
        cfg.tolerances.norm_rel = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run_config(&cli).and_then(|cfg| commands::dispatch(&cli.command, &cfg));
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
