fn main() {
    std::process::exit(quadrics::cli::main_with(std::env::args_os()));
}
