fn main() {
    let code = switchcert::cli::run(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
