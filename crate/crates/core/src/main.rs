fn main() {
    std::process::exit(schedval::cli::cli_main(std::env::args_os()));
}
