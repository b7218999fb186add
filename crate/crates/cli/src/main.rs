//! `bcontact`: command-line front end for b^m contact computations.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use input::Failure;
use report::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "bcontact", version, about = "Contact forms with b^m singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Clone, Debug)]
struct Common {
    /// Chart JSON document.
    #[arg(long)]
    chart: Option<PathBuf>,
    /// Form literal.
    #[arg(long)]
    form: Option<String>,
    /// File with a form literal or a form document.
    #[arg(long)]
    form_file: Option<PathBuf>,
    /// Off-Z sample count; the on-Z count is half of it.
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Distance from Z below which off-Z samples are rejected.
    #[arg(long, default_value_t = 1e-3)]
    z_margin: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp so that reports are reproducible.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args, Clone, Debug)]
struct ProfileArgs {
    /// Profile family: even, odd (or onesided for sing).
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Contact test of a b^m 1-form.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Reeb field.
    Reeb {
        #[command(flatten)]
        common: Common,
        /// Evaluate point by point instead of building R symbolically.
        #[arg(long)]
        pointwise: bool,
    },
    /// Hamiltonian vector field of a function.
    Hamiltonian {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        hamiltonian: String,
    },
    /// Darboux class at points of Z.
    Classify {
        #[command(flatten)]
        common: Common,
        /// `name=value,...`; repeatable.
        #[arg(long, required = true)]
        point: Vec<String>,
    },
    /// Area form on Z of a 3-dimensional form.
    Theta {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pointwise: bool,
    },
    /// Jacobi pair and its identities.
    Jacobi {
        #[command(flatten)]
        common: Common,
        /// Liouville field of dα; builds Λ = Π + R∧X.
        #[arg(long)]
        vector: Option<String>,
        #[arg(long)]
        pointwise: bool,
    },
    /// b-Jacobi transversality of the pair of a contact form.
    Transversality {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pointwise: bool,
    },
    /// Homogeneous Poisson structure on M × R.
    Poissonize {
        #[command(flatten)]
        common: Common,
    },
    /// Symplectization d(e^t α).
    Symplectize {
        #[command(flatten)]
        common: Common,
    },
    /// Contact form induced on a hypersurface by a Liouville field.
    Contract {
        #[command(flatten)]
        common: Common,
        /// Liouville field of the 2-form given by --form.
        #[arg(long)]
        vector: String,
        /// Map document of the hypersurface.
        #[arg(long)]
        map_file: PathBuf,
    },
    /// Smooth (even m) or folded (odd m) contact form from a b^m one.
    Desing {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// b^m contact form from a vertically invariant contact form.
    Sing {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        profile: ProfileArgs,
        /// Vertical coordinate.
        #[arg(long, default_value = "t")]
        t: String,
        /// Desingularize the result again into a folded form (odd, k = 0).
        #[arg(long)]
        fold: bool,
    },
    /// Convergence of the desingularized Jacobi pairs as ε → 0.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
        eps: Vec<f64>,
        /// Region |z| >= kappa where the discrepancies are measured.
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Built-in examples.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List {
        #[command(flatten)]
        common: Common,
    },
    Show {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    Verify {
        name: Option<String>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Check { common }
            | Command::Reeb { common, .. }
            | Command::Hamiltonian { common, .. }
            | Command::Classify { common, .. }
            | Command::Theta { common, .. }
            | Command::Jacobi { common, .. }
            | Command::Transversality { common, .. }
            | Command::Poissonize { common }
            | Command::Symplectize { common }
            | Command::Contract { common, .. }
            | Command::Desing { common, .. }
            | Command::Sing { common, .. }
            | Command::Converge { common, .. } => common,
            Command::Catalog { action } => match action {
                CatalogAction::List { common }
                | CatalogAction::Show { common, .. }
                | CatalogAction::Verify { common, .. } => common,
            },
        }
    }
}

fn run_config(c: &Common) -> Result<RunConfig, Failure> {
    if c.grid < 2 {
        return Err(input::input_err("--grid must be at least 2"));
    }
    if !(c.tol > 0.0 && c.tol.is_finite()) {
        return Err(input::input_err("--tol must be positive"));
    }
    if !(c.z_margin > 0.0 && c.z_margin.is_finite()) {
        return Err(input::input_err("--z-margin must be positive"));
    }
    Ok(RunConfig {
        grid_off_z: c.grid,
        grid_on_z: c.grid / 2,
        tol: c.tol,
        seed: c.seed,
        z_margin: c.z_margin,
        out: c.out.clone(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common().clone();
    let outcome = run_config(&common).and_then(|cfg| commands::run(&cli.command, cfg));
    match outcome {
        Ok(mut report) => {
            if !common.no_timestamp {
                report.timestamp = Some(chrono::Utc::now().to_rfc3339());
            }
            let text = report.to_json();
            match &common.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Math(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(1)
        }
    }
}
