fn main() {
    std::process::exit(coaodv_sim::cli::main());
}
