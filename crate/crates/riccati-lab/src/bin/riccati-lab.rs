use riccati_lab::cli;

fn main() {
    let cfg = match cli::args::parse_from_env() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{}", e.error_line());
            std::process::exit(e.exit);
        }
    };
    std::process::exit(cli::run(&cfg));
}
