fn main() {
    std::process::exit(varreg::harness::cli_main(std::env::args_os()));
}
