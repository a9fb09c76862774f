fn main() {
    std::process::exit(ehupm::cli::run(std::env::args_os()));
}
