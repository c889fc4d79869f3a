//! Runs every verification preset and prints one line per criterion.
//! Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use helical_oseen::presets::{run_preset, Preset, PresetOptions};

fn main() -> ExitCode {
    let verbose = std::env::args().any(|a| a == "--verbose");
    let opts = PresetOptions::default();
    let mut failed = Vec::new();
    for p in Preset::ALL {
        let start = Instant::now();
        match run_preset(p, &opts) {
            Ok(r) => {
                println!("{} [{:.1}s]", r.headline(), start.elapsed().as_secs_f64());
                for c in r.checks.iter().filter(|c| verbose || !c.passed) {
                    println!("    {}", c.line());
                }
                if !r.passed() {
                    failed.push(p.criterion());
                }
            }
            Err(e) => {
                println!("FAIL criterion {} ({}) — error: {e}", p.criterion(), p.name());
                failed.push(p.criterion());
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", Preset::ALL.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
