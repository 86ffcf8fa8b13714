fn main() {
    std::process::exit(jetvar::cli::main_entry());
}
