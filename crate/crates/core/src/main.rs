fn main() {
    std::process::exit(qmehler::cli::main_with_args(std::env::args_os()));
}
