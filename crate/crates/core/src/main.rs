use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use picheck::driver::{Options, Session};
use picheck::reduce::DEFAULT_FUEL;

/// Check `.pv` proof files.
#[derive(Parser, Debug)]
#[command(name = "picheck", version)]
struct Cli {
    /// Print one JSON report object per file instead of text.
    #[arg(long)]
    json: bool,
    /// Reduction budget for a single normalization or conversion.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Extra directory to search for `Require`d modules.
    #[arg(short = 'I', value_name = "PATH")]
    include: Vec<PathBuf>,
    #[arg(value_name = "FILE", required = true)]
    files: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let mut session = Session::new(Options { include_paths: cli.include, fuel: cli.fuel });
    let mut all_ok = true;
    for file in &cli.files {
        match session.check_file(file) {
            Ok(report) => {
                all_ok &= report.is_ok();
                if cli.json {
                    println!("{}", report.to_json());
                } else {
                    print!("{}", report.to_text());
                }
            }
            Err(e) => {
                eprintln!("picheck: {e}");
                return ExitCode::from(2);
            }
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
