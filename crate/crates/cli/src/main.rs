fn main() {
    std::process::exit(mgf_cli::run(std::env::args_os()));
}
