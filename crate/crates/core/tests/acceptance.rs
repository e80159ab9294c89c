//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use thompson_psl2::harness::{Mutation, Outcome, Verifier, VerifyConfig};

/// Time budget per criterion, in seconds. Reported, not enforced.
const BUDGETS: [u64; 10] = [1, 1, 10, 30, 5, 30, 5, 5, 5, 60];

fn main() -> ExitCode {
    let verifier = Verifier::new(VerifyConfig::acceptance()).expect("acceptance bounds are valid");
    let mut failed = 0;
    for id in 1..=10u8 {
        let start = Instant::now();
        let result = verifier.criterion(id);
        let elapsed = start.elapsed();
        let budget = Duration::from_secs(BUDGETS[id as usize - 1]);
        let over = if elapsed > budget {
            ", over budget"
        } else {
            ""
        };
        println!(
            "{result} ({:.2}s of {}s{over})",
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        failed += usize::from(result.outcome != Outcome::Pass);
    }

    let run = || {
        Verifier::new(VerifyConfig::new(4, 3))
            .unwrap()
            .run_all()
            .to_string()
    };
    let deterministic = run() == run();
    println!(
        "[{}] determinism: two verification runs print identical summaries",
        tag(deterministic)
    );
    failed += usize::from(!deterministic);

    let mut cfg = VerifyConfig::acceptance();
    cfg.mutation = Some(Mutation::FlipEpsilonSign);
    let mutated = Verifier::new(cfg).unwrap().criterion(4);
    let caught = mutated.outcome == Outcome::Fail;
    println!(
        "[{}] mutation: flipping the sign of eps(s0) breaks the count: {}",
        tag(caught),
        mutated.detail
    );
    failed += usize::from(!caught);

    println!("acceptance: {failed} failing");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn tag(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
