use clap::Parser;

fn main() {
    let cli = fibergrip_cli::Cli::parse();
    if let Err(error) = fibergrip_cli::run(cli) {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}
