fn main() {
    std::process::exit(oilcast_cli::run(std::env::args_os()));
}
