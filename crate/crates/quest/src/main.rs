fn main() {
    std::process::exit(quest::cli::run(std::env::args_os()));
}
