use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schottky_lab_cli::commands::{self, CircleParams, SurveyParams, TorusParams};
use schottky_lab_cli::scene::LoadedScene;
use schottky_lab_cli::{exit, init_threads, stdout_artifact, write_bundle, CliError, Format, Outcome};

#[derive(Debug, Parser)]
#[command(name = "schottky-lab", version, about = "Schottky sets, equivariant extensions and Denjoy constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Directory receiving every artifact plus run_metadata.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Artifact to print (or the only one to write with --out).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scene file.
    Validate {
        scene: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Orbit packing of the removed balls.
    Orbit {
        scene: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate the equivariant extension and its equivariance residuals.
    Extend {
        scene: PathBuf,
        #[command(flatten)]
        survey: SurveyArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Local dilatation profiles of the extension.
    Dilatation {
        scene: PathBuf,
        #[command(flatten)]
        survey: SurveyArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Denjoy constructions on the circle and the torus.
    #[command(subcommand)]
    Denjoy(Denjoy),
}

#[derive(Debug, Args)]
struct SurveyArgs {
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Maximum unfolding depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Probe radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
enum Denjoy {
    /// Blow-up of an irrational rotation.
    Circle {
        scene: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        orbit: Option<usize>,
        /// geometric:S, inverse-square:S or zero.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Round wandering domains along a minimal translation.
    Torus {
        scene: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        rho: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        base: Option<Vec<f64>>,
        #[arg(long)]
        orbit: Option<usize>,
        /// constant:R, harmonic:S or geometric:B:Q.
        #[arg(long)]
        radius_rule: Option<String>,
        /// Orbit length used for the discrepancy.
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

fn load_optional(path: &Option<PathBuf>) -> Result<Option<LoadedScene>, CliError> {
    path.as_deref().map(LoadedScene::read).transpose()
}

fn run(command: Command) -> Result<(Outcome, Output), CliError> {
    Ok(match command {
        Command::Validate { scene, output } => {
            let scene = LoadedScene::read(&scene)?;
            (commands::validate(&scene), output)
        }
        Command::Orbit { scene, depth, output } => (commands::orbit(&LoadedScene::read(&scene)?, depth)?, output),
        Command::Extend { scene, survey, output } => {
            let params = SurveyParams { grid: survey.grid, depth: survey.depth, radii: survey.radii };
            (commands::extend(&LoadedScene::read(&scene)?, &params)?, output)
        }
        Command::Dilatation { scene, survey, output } => {
            let params = SurveyParams { grid: survey.grid, depth: survey.depth, radii: survey.radii };
            (commands::dilatation(&LoadedScene::read(&scene)?, &params)?, output)
        }
        Command::Denjoy(Denjoy::Circle { scene, alpha, orbit, weights, grid, output }) => {
            let scene = load_optional(&scene)?;
            let params = CircleParams {
                alpha,
                orbit,
                weights: weights.as_deref().map(commands::parse_weights).transpose()?,
                grid,
            };
            (commands::denjoy_circle(scene.as_ref(), &params)?, output)
        }
        Command::Denjoy(Denjoy::Torus { scene, rho, base, orbit, radius_rule, points, output }) => {
            let scene = load_optional(&scene)?;
            let params = TorusParams {
                rho,
                base,
                orbit,
                radii: radius_rule.as_deref().map(commands::parse_radius_rule).transpose()?,
                discrepancy_points: points,
            };
            (commands::denjoy_torus(scene.as_ref(), &params)?, output)
        }
    })
}

fn emit(outcome: &Outcome, output: &Output) -> Result<(), CliError> {
    for m in &outcome.messages {
        eprintln!("{m}");
    }
    match &output.out {
        Some(dir) => {
            for path in write_bundle(outcome, dir, output.format)? {
                println!("{}", path.display());
            }
        }
        None => {
            let a = stdout_artifact(outcome, output.format)?;
            let mut out = std::io::stdout().lock();
            out.write_all(a.content.as_bytes()).map_err(|e| CliError::Runtime(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::SUCCESS });
        }
    };
    let result = init_threads().and_then(|()| run(cli.command)).and_then(|(outcome, output)| {
        emit(&outcome, &output)?;
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
