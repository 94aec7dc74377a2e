fn main() {
    std::process::exit(well_invariants::cli::run(std::env::args_os()));
}
