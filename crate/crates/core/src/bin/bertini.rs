fn main() {
    std::process::exit(bertini_core::cli::main_with_args());
}
