fn main() {
    std::process::exit(sparse_hdc_cli::cli::main_with_args(std::env::args_os()));
}
