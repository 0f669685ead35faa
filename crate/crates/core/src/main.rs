fn main() {
    std::process::exit(ebucb::harness::cli::run_cli(std::env::args_os()));
}
