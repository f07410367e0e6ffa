fn main() {
    std::process::exit(anneal_topo::cli::run_cli(std::env::args_os()));
}
