fn main() {
    std::process::exit(slms_cli::main_with_args(std::env::args_os()));
}
