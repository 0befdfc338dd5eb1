use std::process::exit;

fn main() {
    exit(bstsim::cli::run_cli());
}
