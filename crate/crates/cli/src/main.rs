use clap::Parser;

fn main() {
    let cli = slg_cli::Cli::parse();
    if let Err(e) = slg_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
