fn main() {
    std::process::exit(mumford::cli::main_with_args(std::env::args_os()));
}
