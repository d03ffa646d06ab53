fn main() {
    std::process::exit(heat_entropy::cli::main_with_args(std::env::args_os()));
}
