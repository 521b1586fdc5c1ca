fn main() {
    std::process::exit(zkb::runner::main_entry());
}
