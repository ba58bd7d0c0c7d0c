use std::process::exit;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    exit(proofforge::cli::run(&argv, &mut stdout, &mut stderr));
}
