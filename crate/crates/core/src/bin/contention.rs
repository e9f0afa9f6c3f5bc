fn main() {
    std::process::exit(contention::cli::run(std::env::args_os()));
}
