//! Runs every acceptance criterion and prints one line per criterion.
//! Set `FICA_VERIFY_SEED` to use a different seed.

use std::process::ExitCode;

fn main() -> ExitCode {
    let seed = std::env::var("FICA_VERIFY_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let mut failed = 0;
    for criterion in &fica::verify::CRITERIA {
        let outcome = criterion.run(seed);
        println!("{outcome}");
        failed += usize::from(!outcome.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        fica::verify::CRITERIA.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
