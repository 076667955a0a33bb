fn main() {
    std::process::exit(hypspec::cli::run(std::env::args_os()));
}
