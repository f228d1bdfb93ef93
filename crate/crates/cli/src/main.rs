use clap::Parser;

fn main() {
    let cli = ilw_cli::Cli::parse();
    std::process::exit(ilw_cli::main_with(&cli));
}
