fn main() {
    vaisman_cli::init_logging();
    std::process::exit(vaisman_cli::main_with(std::env::args_os()));
}
