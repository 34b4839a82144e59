fn main() {
    std::process::exit(cuntz_kernels::cli::run(std::env::args_os()));
}
