fn main() {
    std::process::exit(domscan::cli::main());
}
