use decoherence::cli;

fn main() {
    let parsed = match cli::parse_invocation(std::env::args_os()) {
        Ok(parsed) => parsed,
        // clap exits 2 on usage errors and 0 for --help/--version
        Err(e) => e.exit(),
    };
    if let Err(e) = cli::execute(parsed) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_status());
    }
}
