use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pseudosplit::fan::DEFAULT_HEIGHT_CAP;
use pseudosplit::perm::DEFAULT_GROUP_ORDER_CAP;
use pseudosplit::problem::{parse_problem_file, run, Config};

#[derive(Parser)]
#[command(
    version,
    about = "Run problem files of pseudo-splitness, s-invariant, fan and oracle jobs"
)]
struct Cli {
    /// Largest group order enumerated
    #[arg(long, global = true, default_value_t = DEFAULT_GROUP_ORDER_CAP)]
    cap_group_order: usize,
    /// Largest height searched or enumerated on fans
    #[arg(long, global = true, default_value_t = DEFAULT_HEIGHT_CAP)]
    cap_height: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every job; prints the JSON report, or a text summary when --out is given
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load and check a problem file without running it
    Validate { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = Config {
        group_order_cap: cli.cap_group_order,
        height_cap: cli.cap_height,
    };
    let file = match &cli.command {
        Command::Run { file, .. } | Command::Validate { file } => file,
    };
    let problem = match parse_problem_file(file, &config) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match cli.command {
        Command::Validate { .. } => {
            println!("ok: {} jobs", problem.jobs.len());
        }
        Command::Run { jobs, out, .. } => {
            let report = run(&problem, &config, jobs);
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, report.to_json()) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                    print!("{}", report.render_text());
                }
                None => print!("{}", report.to_json()),
            }
        }
    }
    ExitCode::SUCCESS
}
