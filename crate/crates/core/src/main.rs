fn main() {
    std::process::exit(mlti::cli::run(std::env::args_os()));
}
