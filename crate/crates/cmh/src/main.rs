fn main() {
    std::process::exit(cmh::cli::run());
}
