fn main() {
    std::process::exit(cvtail::cli::run());
}
