fn main() {
    std::process::exit(arcscan::cli::run(std::env::args_os()));
}
