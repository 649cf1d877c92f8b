fn main() {
    std::process::exit(commonnet::cli::main_with_args(std::env::args_os()));
}
