fn main() {
    std::process::exit(radial::cli::run(std::env::args_os()));
}
