fn main() {
    std::process::exit(ratmin::cli::run(std::env::args_os()));
}
