fn main() {
    std::process::exit(uqqn::cli::run(std::env::args_os()));
}
