use std::io::Write;
use std::process::ExitCode;

use qtclone::Execution;
use qtclone_cli::{execute, CliError};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let (cfg, report) = match execute(&args, Execution::default()) {
        Ok(x) => x,
        Err(e) if e.is_informational() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("qtclone: {}", e.one_line());
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    let csv = report.table.render();
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &csv).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|source| CliError::Output {
                path: "<stdout>".into(),
                source,
            }),
    };
    if let Err(e) = written {
        eprintln!("qtclone: {}", e.one_line());
        return ExitCode::from(e.exit_code() as u8);
    }
    for line in &report.summary {
        eprintln!("{line}");
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
