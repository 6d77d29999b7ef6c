fn main() {
    let code = std::panic::catch_unwind(|| confgraph_cli::main_with(std::env::args_os())).unwrap_or(3);
    std::process::exit(code);
}
