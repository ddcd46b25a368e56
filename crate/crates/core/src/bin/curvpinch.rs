fn main() {
    std::process::exit(curvpinch::cli::run(std::env::args_os()));
}
