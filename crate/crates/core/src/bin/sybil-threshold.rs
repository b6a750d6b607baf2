fn main() {
    let code = sybil_threshold::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
