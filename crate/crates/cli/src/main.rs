mod args;
mod commands;
mod manifest;

use clap::Parser;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match args::Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match commands::dispatch(&cli, &argv) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error[{}]: {}", e.tag(), e);
            std::process::exit(e.exit_code());
        }
    }
}
