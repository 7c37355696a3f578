fn main() {
    std::process::exit(volga_cli::run(std::env::args_os()));
}
