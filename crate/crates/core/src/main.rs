fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONVLAB_LOG", "warn")).init();
    std::process::exit(convlab::cli::run(std::env::args_os()));
}
