fn main() {
    std::process::exit(orgsim::cli::main_with_args(std::env::args_os()));
}
