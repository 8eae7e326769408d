fn main() {
    std::process::exit(tsbounds::cli::run(std::env::args_os()));
}
