fn main() {
    std::process::exit(rw_cli::run(std::env::args_os().collect()));
}
