fn main() {
    std::process::exit(circle_stab::cli::main_with_args(std::env::args_os()));
}
