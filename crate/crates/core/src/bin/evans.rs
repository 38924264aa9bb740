fn main() {
    std::process::exit(evans_core::cli::main_with_args());
}
