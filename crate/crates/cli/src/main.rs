fn main() {
    std::process::exit(hyperflat_cli::main_with_args(std::env::args_os()));
}
