fn main() {
    std::process::exit(finvc_cli::main_with_args(std::env::args_os()));
}
