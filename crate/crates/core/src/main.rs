fn main() {
    std::process::exit(kiteneat::cli::run(std::env::args_os()));
}
