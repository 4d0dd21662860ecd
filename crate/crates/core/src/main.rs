fn main() {
    std::process::exit(mfgprep::cli::main_with_args(std::env::args()));
}
