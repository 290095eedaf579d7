fn main() {
    std::process::exit(willmore::cli::run());
}
