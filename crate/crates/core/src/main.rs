fn main() {
    std::process::exit(pamber::cli::run(std::env::args_os()));
}
