fn main() {
    std::process::exit(hyplab::cli::run(std::env::args_os()));
}
