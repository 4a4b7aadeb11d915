fn main() {
    // RUST_LOG=warn surfaces retry and encoding warnings.
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    std::process::exit(pnc_eval::pipeline::cli::run(std::env::args_os()));
}
