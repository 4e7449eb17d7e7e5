//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p pogrid --test acceptance`.

mod common;
mod criticality;
mod desk;
mod determinism;
mod dynamics;
mod forest;
mod hypotheses;
mod pog;
mod replication;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    /// Wall-clock budget [s], if the criterion has one.
    budget: Option<f64>,
    check: Check,
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let criteria = [
        Criterion {
            id: 1,
            name: "dynamics oracle",
            budget: Some(10.0),
            check: dynamics::run,
        },
        Criterion {
            id: 2,
            name: "hypothesis normalization",
            budget: Some(30.0),
            check: hypotheses::run,
        },
        Criterion {
            id: 3,
            name: "predicted occupancy",
            budget: None,
            check: pog::run,
        },
        Criterion {
            id: 4,
            name: "forest correctness",
            budget: Some(120.0),
            check: forest::run,
        },
        Criterion {
            id: 5,
            name: "straight-road replication",
            budget: Some(300.0),
            check: replication::run,
        },
        Criterion {
            id: 6,
            name: "desk-scale error bands",
            budget: Some(1800.0),
            check: desk::errors,
        },
        Criterion {
            id: 7,
            name: "estimator speedup",
            budget: None,
            check: desk::speedup,
        },
        Criterion {
            id: 8,
            name: "criticality",
            budget: None,
            check: criticality::run,
        },
        Criterion {
            id: 9,
            name: "determinism",
            budget: None,
            check: determinism::run,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let tag = format!("AC{}", c.id);
        if !filter.is_empty() && !filter.contains(&tag) {
            continue;
        }
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        let outcome = match (outcome, c.budget) {
            (Ok(detail), Some(limit)) if secs > limit => {
                Err(format!("{detail}; took {secs:.1} s, budget {limit} s"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("{tag} PASS {}: {detail} [{secs:.1} s]", c.name),
            Err(why) => {
                failed += 1;
                println!("{tag} FAIL {}: {why} [{secs:.1} s]", c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
