use clap::Parser;

fn main() {
    let cli = bifrac::cli::Cli::parse();
    std::process::exit(bifrac::cli::run(&cli));
}
