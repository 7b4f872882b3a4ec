use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = kgval_service::cli::Cli::parse();
    std::process::exit(kgval_service::cli::run(cli));
}
