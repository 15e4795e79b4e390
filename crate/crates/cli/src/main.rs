fn main() {
    std::process::exit(robust_coreset_cli::main_with_args(std::env::args_os()));
}
