fn main() {
    std::process::exit(nocollapse_cli::main_with_args(std::env::args_os()));
}
