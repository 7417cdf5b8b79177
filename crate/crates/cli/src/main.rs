use clap::Parser;
use std::io::Write;
use uncomp_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    match uncomp_cli::execute(&cli) {
        Ok(out) => {
            // A closed stdout (e.g. `| head`) is not an error.
            let _ = writeln!(std::io::stdout().lock(), "{}", out.render(cli.json));
            std::process::exit(out.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
