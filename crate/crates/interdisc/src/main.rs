fn main() {
    std::process::exit(interdisc::cli::run(std::env::args_os()));
}
