fn main() {
    std::process::exit(hwconsensus::cli::main_with_args(std::env::args_os()));
}
