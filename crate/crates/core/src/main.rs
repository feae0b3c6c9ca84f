fn main() {
    std::process::exit(capless::cli::main());
}
