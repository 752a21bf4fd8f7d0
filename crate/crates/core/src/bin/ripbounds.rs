fn main() {
    std::process::exit(ripbounds::cli::run(std::env::args_os()));
}
