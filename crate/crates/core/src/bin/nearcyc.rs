fn main() {
    std::process::exit(nearcyc::cli::main());
}
