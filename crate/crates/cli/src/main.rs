use std::path::PathBuf;
use std::process::ExitCode;

use cavcli::{render_text, run_file, write_reports, Options};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cavcli", version, about = "Run convex-analysis verification scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a scenario file, run its checks and write reports.
    Run {
        file: PathBuf,
        /// Directory for `<name>.txt` and `<name>.json`.
        #[arg(long, default_value = "reports")]
        out: PathBuf,
        /// Multiplies every instance tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Comma-separated check names or kinds to run.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Seed for randomized property suites.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on product-grid sizes.
        #[arg(long, default_value_t = cavcli::run::DEFAULT_MAX_CELLS)]
        max_cells: usize,
        /// Record per-check wall-clock time (reports are then not reproducible).
        #[arg(long)]
        timing: bool,
        /// Do not print the text report.
        #[arg(long, short)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Command::Run {
        file,
        out,
        tol_scale,
        checks,
        seed,
        max_cells,
        timing,
        quiet,
    } = cli.command;
    let opts = Options {
        tol_scale,
        checks,
        seed,
        max_cells,
        timing,
    };
    let rep = match run_file(&file, &opts).and_then(|r| write_reports(&r, &out).map(|_| r)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if !quiet {
        print!("{}", render_text(&rep));
    }
    ExitCode::from(rep.exit_code as u8)
}
