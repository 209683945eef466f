use clap::Parser;

fn main() {
    let cli = lineshape_cli::Cli::parse();
    std::process::exit(lineshape_cli::run(&cli));
}
