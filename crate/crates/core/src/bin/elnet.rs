fn main() {
    std::process::exit(elnet::cli::main_from_args(std::env::args_os()));
}
