fn main() {
    std::process::exit(matchdist::cli::run(std::env::args_os()));
}
