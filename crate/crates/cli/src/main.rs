use clap::Parser;
use ncdirac_cli::cli::{invoke, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(invoke(&cli));
}
