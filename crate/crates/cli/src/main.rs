fn main() {
    std::process::exit(prodlab_cli::run(std::env::args_os()));
}
