fn main() {
    std::process::exit(qtpp_cli::run(std::env::args_os()));
}
