fn main() {
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    let code = interstatis::cli::main_with_args(std::env::args_os(), &mut stdout, &mut stderr);
    std::process::exit(code);
}
