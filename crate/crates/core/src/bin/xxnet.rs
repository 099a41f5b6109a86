fn main() {
    std::process::exit(xxnet::cli::run(std::env::args_os()));
}
