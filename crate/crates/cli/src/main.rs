fn main() {
    std::process::exit(specfid_cli::run(std::env::args_os()));
}
