fn main() {
    std::process::exit(fameeq::cli::main_with_args(std::env::args_os()));
}
