//! The `dualpoly` binary.

fn main() {
    match dualpoly_cli::cli::run(std::env::args().collect()) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
