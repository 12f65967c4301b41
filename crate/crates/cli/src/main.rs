use clap::Parser;
use fractal_spectra_cli::{configure_threads, run, Cli, EXIT_INVALID};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("fspec: {}", f.message);
        std::process::exit(f.code);
    }
    std::process::exit(run(&cli));
}
