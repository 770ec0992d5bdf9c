fn main() {
    std::process::exit(trapload::cli::run(std::env::args_os()));
}
