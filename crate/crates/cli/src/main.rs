fn main() {
    std::process::exit(hetgev_cli::main_with_args(std::env::args_os()));
}
