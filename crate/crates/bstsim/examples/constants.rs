//! Solve the growth constants and show how well they satisfy their
//! defining equations.

use bstsim::constants::{constants_set, criticality_residual, psi};

fn main() {
    let set = constants_set();
    print!("{}", bstsim::io::to_pretty_string(&set));

    // the height constant is the unique zero of the criticality defect
    // in (0, 1); probe it on both sides
    eprintln!();
    for theta in [0.5, set.a, 1.0] {
        eprintln!(
            "criticality defect at theta={theta:.6}: {:+.3e} (psi={:.6})",
            criticality_residual(theta),
            psi(theta)
        );
    }
    eprintln!(
        "height rate b/a = {:.12} (leading height ~ (b/a) log n)",
        set.c
    );
}
