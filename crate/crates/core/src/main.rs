fn main() {
    std::process::exit(splicetool::cli::run(std::env::args_os()));
}
