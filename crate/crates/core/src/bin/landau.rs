fn main() {
    std::process::exit(landau::cli::main());
}
