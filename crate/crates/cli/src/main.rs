fn main() {
    std::process::exit(gpc_cli::run(std::env::args_os()));
}
