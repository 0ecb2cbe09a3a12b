fn main() {
    std::process::exit(qfock::cli::run(std::env::args_os()));
}
