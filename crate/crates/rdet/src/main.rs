fn main() {
    std::process::exit(rdet::cli::run(std::env::args_os()));
}
