use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use prodcheck_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match run(&cli, &mut out) {
        Ok(code) => code,
        Err(f) => {
            if cli.json {
                let _ = writeln!(out, "{}", serde_json::json!({ "error": f.message, "exit": f.code }));
            }
            eprintln!("error: {f}");
            f.code
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
