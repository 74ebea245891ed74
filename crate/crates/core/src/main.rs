fn main() {
    std::process::exit(safm::cli::run(std::env::args_os()));
}
