fn main() {
    std::process::exit(sepvol::cli::main_with_args(std::env::args_os()));
}
