use clap::Parser;
use poolgame::cli::{self, Cli};

fn main() {
    if let Err(e) = cli::run(Cli::parse()) {
        eprintln!("poolgame: {e}");
        std::process::exit(e.exit_code());
    }
}
