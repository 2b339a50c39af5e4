fn main() {
    std::process::exit(mchf_core::cli::run(std::env::args_os()));
}
