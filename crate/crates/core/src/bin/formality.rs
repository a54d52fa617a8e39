use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use formality_core::cli::{self, document::Document, Report, Status};
use formality_core::{Degree, Error};

#[derive(Parser)]
#[command(
    name = "formality",
    version,
    about = "Exact computations with DGL and L-infinity presentations"
)]
struct Args {
    /// Print the machine-readable report.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 3 when a verdict is undecided.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the consistency gates of a document (d² = 0, Jacobi).
    Check { file: PathBuf },
    /// Homology of a DGL in one degree.
    Homology {
        file: PathBuf,
        #[arg(long)]
        degree: Degree,
    },
    /// DGL model of a higher Whitehead product of spheres.
    WhiteheadModel {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<Degree>,
        #[arg(long)]
        truncation: Option<Degree>,
    },
    /// Bracket set of classes, e.g. `--classes v1,v2,v3,v4`.
    BracketSet {
        file: PathBuf,
        #[arg(long)]
        classes: String,
        /// Compute in the homology Lie algebra instead.
        #[arg(long)]
        homology: bool,
    },
    /// Formality test by comparing bracket sets.
    Formality {
        file: PathBuf,
        #[arg(long)]
        classes: String,
    },
    /// Word-length spectral sequence of the chains.
    Ss {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        page: usize,
        #[arg(long, default_value_t = 20)]
        max_degree: Degree,
    },
    /// Dual algebra of an L-infinity document, or brackets of an algebra.
    Dualize { file: PathBuf },
    /// Graded determinant, e.g. `--matrix "1,2;3,4" --degrees 3,3`.
    GradedDet {
        #[arg(long)]
        matrix: String,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        degrees: Vec<Degree>,
    },
    /// Intrinsic coformality of a product of odd spheres.
    IntrinsicCoformal {
        #[arg(long, value_delimiter = ',', required = true)]
        spheres: Vec<i64>,
        /// Treat the entries as degrees of even Eilenberg-Mac Lane spaces.
        #[arg(long)]
        eilenberg_mac_lane: bool,
    },
    /// Run the regression suite over the reference examples.
    Examples,
    /// Print a document in canonical form.
    Canonical { file: PathBuf },
}

enum Failure {
    Input(anyhow::Error),
    Kernel(Error),
}

fn load(path: &PathBuf) -> Result<Document, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Input)?;
    Document::parse(&text).map_err(|e| Failure::Input(anyhow::anyhow!("{}:{e}", path.display())))
}

fn run(args: &Args) -> Result<Report, Failure> {
    let k = Failure::Kernel;
    match &args.command {
        Command::Check { file } => Ok(cli::check(&load(file)?)),
        Command::Homology { file, degree } => cli::homology(&load(file)?, *degree).map_err(k),
        Command::WhiteheadModel { dims, truncation } => cli::whitehead_model(dims, *truncation).map_err(k),
        Command::BracketSet {
            file,
            classes,
            homology,
        } => cli::bracket_set(&load(file)?, classes, *homology).map_err(k),
        Command::Formality { file, classes } => cli::formality(&load(file)?, classes).map_err(k),
        Command::Ss { file, page, max_degree } => cli::spectral_sequence(&load(file)?, *page, *max_degree).map_err(k),
        Command::Dualize { file } => cli::dualize_document(&load(file)?).map_err(k),
        Command::GradedDet { matrix, degrees } => {
            let m = cli::parse_matrix(matrix).map_err(k)?;
            cli::graded_determinant(&m, degrees).map_err(Failure::Kernel)
        }
        Command::IntrinsicCoformal {
            spheres,
            eilenberg_mac_lane,
        } => cli::intrinsic_coformal(spheres, *eilenberg_mac_lane).map_err(k),
        Command::Examples => Ok(cli::reference_examples()),
        Command::Canonical { file } => {
            let doc = load(file)?;
            let text = doc.to_text();
            Ok(Report {
                command: "canonical".into(),
                status: Status::Ok,
                lines: text.lines().map(String::from).collect(),
                data: serde_json::json!({ "document": text }),
            })
        }
    }
}

fn exit_for(status: Status, strict: bool) -> u8 {
    match status {
        Status::Ok => 0,
        Status::Failed => 1,
        Status::Undecided if strict => 3,
        Status::Undecided => 0,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(report) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json"));
            } else {
                print!("{}", report.text());
            }
            ExitCode::from(exit_for(report.status, args.strict))
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Kernel(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Undecided(_) => ExitCode::from(exit_for(Status::Undecided, args.strict)),
                _ => ExitCode::from(2),
            }
        }
    }
}
