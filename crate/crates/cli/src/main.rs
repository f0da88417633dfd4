use clap::Parser;

fn main() {
    let cli = tvstable_cli::Cli::parse();
    if let Err(e) = tvstable_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
