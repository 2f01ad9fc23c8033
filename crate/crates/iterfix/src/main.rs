fn main() {
    std::process::exit(iterfix::cli::main_entry());
}
