//! One line per acceptance criterion; exits non-zero if any fails.
//! The seed comes from `BIHAM_SEED` (default 7).

use std::process::ExitCode;
use std::time::Instant;

use biham_core::checks::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let seed = std::env::var("BIHAM_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(7);
    println!("acceptance suite, seed {seed}");
    let start = Instant::now();
    let mut failed = Vec::new();
    for id in CRITERIA {
        let o = run_criterion(id, seed).expect("known criterion");
        println!("{}", o.line());
        if !o.passed {
            failed.push(id);
        }
    }
    println!("{} of {} criteria passed in {:.1}s", CRITERIA.len() - failed.len(), CRITERIA.len(), start.elapsed().as_secs_f64());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
