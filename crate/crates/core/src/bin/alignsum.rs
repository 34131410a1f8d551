fn main() {
    std::process::exit(alignsum::cli::run(std::env::args_os()));
}
