fn main() {
    std::process::exit(toricsieve::run_cli());
}
