//! Acceptance gate: one line per criterion, then the invariant suites.
//! Exits non-zero if anything fails.

mod common;
mod criteria;
mod properties;

use std::process::ExitCode;
use std::time::Instant;

type Criterion = (&'static str, fn() -> criteria::Outcome);

fn line(label: &str, outcome: &criteria::Outcome, secs: f64) -> bool {
    match outcome {
        Ok(()) => {
            println!("[PASS] {label} ({secs:.2} s)");
            true
        }
        Err(why) => {
            println!("[FAIL] {label} ({secs:.2} s)\n       {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("criterion 1: Cahen-Wallach I catalog values", criteria::criterion_1),
        ("criterion 2: Cahen-Wallach II catalog values", criteria::criterion_2),
        ("criterion 3: orbit parametrizations", criteria::criterion_3),
        ("criterion 4: flat3 reflections and transvection", criteria::criterion_4),
        ("criterion 5: geometric property suites", criteria::criterion_5),
        ("criterion 6: extension round trip", criteria::criterion_6),
        ("criterion 7: cohomology soundness", criteria::criterion_7),
        ("criterion 8: determinism", criteria::criterion_8),
    ];
    let mut failed = 0;
    println!("acceptance criteria");
    for (label, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        if !line(label, &outcome, start.elapsed().as_secs_f64()) {
            failed += 1;
        }
    }
    println!("invariant suites ({} trials each)", common::CASES);
    for (i, (name, prop)) in properties::INVARIANTS.iter().enumerate() {
        let start = Instant::now();
        let outcome = criteria::run_property(2000 + i as u64, *prop);
        if !line(name, &outcome, start.elapsed().as_secs_f64()) {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} failed");
        ExitCode::FAILURE
    }
}
