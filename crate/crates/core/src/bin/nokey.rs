fn main() {
    std::process::exit(nokey::harness::cli::main());
}
