fn main() {
    std::process::exit(strongly_harmonic::cli::run(std::env::args_os()));
}
