use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use plap_cli::{execute, render, Cli, THREADS_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let env_threads = std::env::var(THREADS_ENV).ok();
    let (cfg, report) = match execute(cli.command, &cli.args, env_threads.as_deref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("plap: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = match render(&report, cfg.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("plap: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("plap: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("plap: {} failed", cli.command);
        ExitCode::from(2)
    }
}
