fn main() {
    std::process::exit(gmac_core::cli::run(std::env::args_os()));
}
