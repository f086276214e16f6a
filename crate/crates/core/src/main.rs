fn main() {
    std::process::exit(surface7::cli::main_with_args(std::env::args_os()));
}
