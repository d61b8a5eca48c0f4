fn main() {
    std::process::exit(chi2qec::cli::run(std::env::args_os()));
}
