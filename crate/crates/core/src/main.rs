fn main() {
    std::process::exit(graycoh::cli::run(std::env::args_os()));
}
