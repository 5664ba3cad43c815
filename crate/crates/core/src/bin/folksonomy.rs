fn main() {
    std::process::exit(folksonomy::cli::run(std::env::args_os()));
}
