fn main() {
    std::process::exit(lorenz_dct::cli::cli_main(std::env::args_os()));
}
