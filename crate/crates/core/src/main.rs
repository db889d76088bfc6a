fn main() {
    std::process::exit(poismean::cli::run());
}
