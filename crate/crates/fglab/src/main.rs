fn main() {
    std::process::exit(fglab::run());
}
