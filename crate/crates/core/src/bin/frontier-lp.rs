fn main() {
    std::process::exit(frontier_lp::cli::run_cli(std::env::args_os()));
}
