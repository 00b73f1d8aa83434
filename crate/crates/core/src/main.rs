use std::process::ExitCode;

use affine_smile::cli::{configure_threads, run, Cli, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let exec = match configure_threads() {
        Ok(exec) => exec,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code as u8);
        }
    };
    let cfg = RunConfig {
        exec,
        ..RunConfig::from_cli(cli)
    };
    ExitCode::from(run(&cfg) as u8)
}
