fn main() {
    std::process::exit(opradius::cli::main_entry());
}
