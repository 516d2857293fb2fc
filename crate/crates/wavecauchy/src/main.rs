fn main() {
    std::process::exit(wavecauchy::cli::run(std::env::args_os()));
}
