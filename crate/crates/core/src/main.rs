fn main() {
    std::process::exit(xysteer::cli::run(std::env::args_os()));
}
