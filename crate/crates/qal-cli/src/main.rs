fn main() {
    std::process::exit(qal_cli::run(std::env::args_os()));
}
