fn main() {
    std::process::exit(hfsc::cli::main_exit_code());
}
