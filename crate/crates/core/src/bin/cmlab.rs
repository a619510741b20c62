fn main() {
    std::process::exit(cmlab::cli::run(std::env::args_os()));
}
