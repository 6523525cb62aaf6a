use clap::Parser;

use csgnash_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(f) = csgnash_cli::configure_threads() {
        eprintln!("error: {f}");
        std::process::exit(f.code);
    }
    std::process::exit(csgnash_cli::execute(cli));
}
