fn main() {
    std::process::exit(simple_regen::cli::run(std::env::args_os()));
}
