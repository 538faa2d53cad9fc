fn main() {
    ncs_abstract::cli::init_threads();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = ncs_abstract::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
