fn main() {
    std::process::exit(fklens::cli::run(std::env::args_os()));
}
