fn main() {
    std::process::exit(pseudoentropy_tools::run(std::env::args().collect()));
}
