fn main() {
    std::process::exit(bispec::cli::run());
}
