fn main() {
    std::process::exit(tronquee::cli_run::main_with(std::env::args_os()));
}
