use clap::Parser;

fn main() {
    let cli = wos_cli::app::Cli::parse();
    let env_seed = std::env::var("WOS_SEED").ok();
    match wos_cli::app::execute(&cli, env_seed.as_deref()) {
        Ok(out) => {
            print!("{}", out.stdout);
            if let Some(msg) = out.failure {
                eprintln!("assertion failed: {msg}");
                std::process::exit(3);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
