use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use cpn_surface::cli::{run, run_catalog, CatalogAction, Command, Outcome, EXIT_USAGE};
use cpn_surface::config::RunConfig;

#[derive(Parser)]
#[command(name = "cpn-surface", version, about = "Surfaces in su(N) from CP^(N-1) sigma model solutions")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// Directory for output files; overrides `output.dir`. Without either,
    /// the output goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Equation-of-motion, holomorphy and constraint residuals over the grid.
    Check { config: PathBuf },
    /// Metric, curvatures and det g as CSV.
    Geom { config: PathBuf },
    /// Surface coordinates as CSV.
    Immerse { config: PathBuf },
    /// SU(3) moving frame and Gauss-Weingarten residuals as JSON (N = 3).
    Frame { config: PathBuf },
    /// Topological charge (holomorphic solutions).
    Charge { config: PathBuf },
    /// Willmore functional over a square (holomorphic solutions).
    Willmore { config: PathBuf },
    /// Apply a symmetry and report residuals.
    Symmetry { config: PathBuf },
    /// List, verify or export the solution catalog.
    Catalog {
        #[arg(value_enum)]
        action: Action,
        /// Extra catalog entries (TOML) to register first.
        entries: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Action {
    List,
    Verify,
    Export,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(outcome: &Outcome, dir: Option<&Path>) -> Result<(), String> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            for a in &outcome.artifacts {
                let path = dir.join(&a.file_name);
                fs::write(&path, &a.contents).map_err(|e| format!("{}: {e}", path.display()))?;
                println!("wrote {}", path.display());
            }
        }
        None => {
            for a in &outcome.artifacts {
                print!("{}", a.contents);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let generated = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let (outcome, config_dir) = match &args.command {
        Cmd::Catalog { action, entries } => {
            let action = match action {
                Action::List => CatalogAction::List,
                Action::Verify => CatalogAction::Verify,
                Action::Export => CatalogAction::Export,
            };
            let extra = match entries.as_deref().map(read).transpose() {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE as u8);
                }
            };
            (run_catalog(action, extra.as_deref(), generated), None)
        }
        cmd => {
            let (command, path) = match cmd {
                Cmd::Check { config } => (Command::Check, config),
                Cmd::Geom { config } => (Command::Geom, config),
                Cmd::Immerse { config } => (Command::Immerse, config),
                Cmd::Frame { config } => (Command::Frame, config),
                Cmd::Charge { config } => (Command::Charge, config),
                Cmd::Willmore { config } => (Command::Willmore, config),
                Cmd::Symmetry { config } => (Command::Symmetry, config),
                Cmd::Catalog { .. } => unreachable!(),
            };
            let text = match read(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE as u8);
                }
            };
            let dir = RunConfig::from_text(&text).ok().and_then(|c| c.output.dir).map(|d| {
                if d.is_relative() {
                    path.parent().unwrap_or(Path::new(".")).join(d)
                } else {
                    d
                }
            });
            (run(command, &text, generated), dir)
        }
    };
    let dir = args.out.or(config_dir);
    if let Err(e) = emit(&outcome, dir.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    eprintln!("{}", outcome.summary);
    ExitCode::from(outcome.code as u8)
}
