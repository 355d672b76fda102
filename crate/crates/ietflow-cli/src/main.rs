fn main() {
    std::process::exit(ietflow_cli::run(std::env::args_os()));
}
