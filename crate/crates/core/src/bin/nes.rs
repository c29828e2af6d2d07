fn main() {
    std::process::exit(nes::cli::run_from_args(std::env::args_os()));
}
