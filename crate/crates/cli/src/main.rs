use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use divmon_cli::{run_command, Cli, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(Outcome::USAGE);
        }
    }
    let outcome = run_command(&cli);
    let document = outcome.report.to_string();

    let mut stdout = std::io::stdout().lock();
    match cli.global.report.as_deref() {
        Some(p) if p.as_os_str() == "-" => {
            let _ = stdout.write_all(document.as_bytes());
            return ExitCode::from(outcome.code);
        }
        Some(p) => {
            if let Err(e) = std::fs::write(p, document) {
                eprintln!("error: writing {}: {e}", p.display());
                return ExitCode::from(Outcome::USAGE);
            }
        }
        None => {}
    }
    if outcome.code == Outcome::USAGE {
        eprint!("{}", outcome.text);
    } else {
        let _ = stdout.write_all(outcome.text.as_bytes());
    }
    ExitCode::from(outcome.code)
}
