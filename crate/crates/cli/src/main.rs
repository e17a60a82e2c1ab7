use clap::Parser;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = avlab_cli::args::Cli::parse();
    std::process::exit(avlab_cli::run(cli, &argv));
}
