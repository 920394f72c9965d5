fn main() {
    std::process::exit(symx_cli::run());
}
