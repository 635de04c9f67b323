use std::process::ExitCode;

use clap::Parser;

use dotphase_cli::{emit, run_cli, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = run_cli(cli).and_then(|(rendered, path)| {
        for w in rendered.report.iter().flat_map(|r| &r.warnings) {
            eprintln!("warning: {w}");
        }
        emit(&rendered, path.as_deref())
    });
    match result {
        Ok(Some(path)) => {
            eprintln!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
