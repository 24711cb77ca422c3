fn main() {
    std::process::exit(kober::cli::main());
}
