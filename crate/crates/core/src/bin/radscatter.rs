fn main() {
    std::process::exit(radscatter::cli::main_with(std::env::args_os()));
}
