fn main() {
    std::process::exit(chronolog::cli::main());
}
