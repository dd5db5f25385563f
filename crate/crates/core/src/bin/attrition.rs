use clap::Parser;

fn main() {
    let cli = attrition::cli::Cli::parse();
    if let Err(e) = attrition::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
