use clap::Parser;

fn main() {
    let cli = eigenphase_cli::Cli::parse();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    std::process::exit(eigenphase_cli::run(cli, &mut out, &mut err));
}
