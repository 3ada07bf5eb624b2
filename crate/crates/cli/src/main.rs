#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Fit(a) => commands::fit(a),
        Command::Mc(a) => commands::mc(a),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
