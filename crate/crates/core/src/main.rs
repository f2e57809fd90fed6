fn main() {
    std::process::exit(lipctl::cli::run(std::env::args_os()));
}
