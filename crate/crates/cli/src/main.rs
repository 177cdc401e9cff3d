use clap::Parser;

fn main() {
    let cli = rfo_cli::Cli::parse();
    let verbose = cli.verbose;
    rfo_cli::init_logging(verbose);
    match rfo_cli::run(&cli) {
        Ok(env) => {
            log::info!("wrote {} artifacts", env.artifacts.len());
        }
        Err(e) => {
            log::error!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
