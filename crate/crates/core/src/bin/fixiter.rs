fn main() {
    std::process::exit(fixiter::cli::main_with_args(std::env::args_os()));
}
