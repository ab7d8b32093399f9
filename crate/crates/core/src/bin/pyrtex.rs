fn main() {
    std::process::exit(pyrtex::cli::run(std::env::args_os()));
}
