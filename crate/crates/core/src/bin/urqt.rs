fn main() {
    std::process::exit(urqt::harness::cli::run(std::env::args_os()));
}
