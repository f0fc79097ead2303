fn main() {
    std::process::exit(dslpn_cli::run(std::env::args_os()));
}
