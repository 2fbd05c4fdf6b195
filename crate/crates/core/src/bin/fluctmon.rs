fn main() {
    std::process::exit(fluctmon::cli::main_with_args(std::env::args_os()));
}
