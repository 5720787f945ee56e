fn main() {
    std::process::exit(islr::cli::dispatch(std::env::args_os()));
}
