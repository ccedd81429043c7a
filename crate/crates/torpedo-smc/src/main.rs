fn main() {
    std::process::exit(torpedo_smc::cli::main_entry(std::env::args_os()));
}
