fn main() {
    std::process::exit(cahm_cli::run_cli(std::env::args_os()));
}
