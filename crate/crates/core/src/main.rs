fn main() {
    std::process::exit(sgclass::cli::main_with_args(std::env::args_os()));
}
