mod commands;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::UsageError;

#[derive(Parser)]
#[command(name = "orbitkit", version, about = "Coadjoint orbits of SO(6): classification, moment polytopes and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Sampling {
    /// Number of samples (suite default when omitted).
    #[arg(long)]
    n: Option<usize>,
    /// Random seed.
    #[arg(long, env = "ORBITKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Tolerance (command default when omitted).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a 2-form given as {"coeffs": [15 numbers]}.
    Classify {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Moment polytope conv(W·λ), exact arithmetic.
    Polytope {
        #[arg(long)]
        lambda: String,
        /// OFF mesh output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Facet JSON output.
        #[arg(long)]
        facets: Option<PathBuf>,
    },
    /// Haar samples of μ_T over the orbit of λ, checked against its polytope.
    Sample {
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        sampling: Sampling,
        /// CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite.
    Verify {
        suite: Suite,
        #[command(flatten)]
        sampling: Sampling,
        /// Weight λ for the singular suite.
        #[arg(long)]
        lambda: Option<String>,
        /// Prism weight t₀ (edge-prism) or fibre weight t (square).
        #[arg(long, default_value_t = 1.0)]
        t0: f64,
    },
    /// Inverse images of an edge or of the central square.
    Klein {
        which: KleinKind,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, default_value_t = 1.0)]
        t0: f64,
        /// CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Region facet JSON output.
        #[arg(long)]
        facets: Option<PathBuf>,
    },
    /// Integrability scans on the Iwasawa manifold.
    Iwasawa {
        sub: IwasawaKind,
        #[command(flatten)]
        sampling: Sampling,
        /// CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Region facet JSON output (mixed).
        #[arg(long)]
        facets: Option<PathBuf>,
        /// Closure class of the product structures (mixed).
        #[arg(long, value_enum, default_value_t = MixedWhich::K)]
        which: MixedWhich,
        /// Complex structure for a single mixed pair.
        #[arg(long, requires = "plane_form")]
        ocs: Option<PathBuf>,
        /// Unit simple 2-form of the plane for a single mixed pair.
        #[arg(long, requires = "ocs")]
        plane_form: Option<PathBuf>,
    },
    /// Write OFF meshes and facet files for the tabulated orbits and regions.
    Export {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Ags,
    Prop16,
    Octahedron,
    Intersection,
    Singular,
    SpinCover,
    EdgePrism,
    Square,
    F3Segments,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KleinKind {
    EdgePrism,
    Square,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IwasawaKind {
    ScanComplex,
    ScanK,
    ScanKk,
    Mixed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MixedWhich {
    K,
    Kk,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { form, tol } => commands::classify(&form, tol),
        Command::Polytope { lambda, out, facets } => commands::polytope(&lambda, out.as_deref(), facets.as_deref()),
        Command::Sample { lambda, sampling, out } => commands::sample(&lambda, &sampling, out.as_deref()),
        Command::Verify { suite, sampling, lambda, t0 } => suites::run(suite, &sampling, lambda.as_deref(), t0),
        Command::Klein { which, sampling, t0, out, facets } => {
            commands::klein(which, &sampling, t0, out.as_deref(), facets.as_deref())
        }
        Command::Iwasawa { sub, sampling, out, facets, which, ocs, plane_form } => commands::iwasawa(
            sub,
            &sampling,
            out.as_deref(),
            facets.as_deref(),
            which,
            ocs.as_deref().zip(plane_form.as_deref()),
        ),
        Command::Export { out } => commands::export(&out),
    };
    match result {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
