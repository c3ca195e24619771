fn main() {
    let code = banditlk::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
