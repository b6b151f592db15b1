use clap::Parser;

fn main() {
    let cli = tippe_cli::Cli::parse();
    if let Err(e) = tippe_cli::run(cli) {
        eprintln!("tippe: {e}");
        std::process::exit(e.exit_code());
    }
}
