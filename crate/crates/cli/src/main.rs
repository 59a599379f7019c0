fn main() {
    std::process::exit(cogtwin_cli::run(std::env::args_os()));
}
