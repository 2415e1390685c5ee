fn main() {
    std::process::exit(symlab::cli::run(std::env::args_os()));
}
