//! Running a registered theorem suite on sampled hypotheses and on
//! hand-picked parameters, and writing the report.
//!
//! ```text
//! cargo run -p foxh --example theorem_suite [theorem] [samples]
//! ```

use std::collections::BTreeMap;

use foxh::harness::{self, list_theorems, run_theorem_on, run_theorem_suite, SuiteConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "kummer".into());
    let samples = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);

    println!("{} theorems registered, e.g.", list_theorems().len());
    for t in list_theorems().iter().take(4) {
        println!("  {:<10} {:<6} {}", t.id, t.hypothesis, t.claim);
    }

    let cfg = SuiteConfig { grid_count: 60, ..SuiteConfig::default() };
    let report = run_theorem_suite(&id, samples, 42, &cfg)?;
    println!("\n{} under {}: passed {}, worst margin {:?}", report.theorem_id, report.hypothesis, report.passed, report.worst_margin);
    for s in &report.samples {
        println!("  #{} {:?} -> {:?}", s.index, s.params, s.worst_margin);
    }
    for note in &report.notes {
        println!("  note: {note}");
    }

    let dir = std::env::temp_dir();
    let path = dir.join(format!("foxh-{}.csv", report.theorem_id));
    report.write_csv(std::fs::File::create(&path)?)?;
    println!("csv written to {}", path.display());

    // an explicit parameter point; rejected if it violates the hypothesis set
    let set = harness::hypothesis_set("H8").expect("registered");
    let mut q = BTreeMap::new();
    q.insert("tau".to_string(), 0.5);
    q.insert("d".to_string(), 2.0);
    match set.check(&q) {
        Ok(()) => {
            let r = run_theorem_on("h8", &[q], 0, &cfg)?;
            println!("\nH8 at τ = 0.5, d = 2: passed {}", r.passed);
            for c in &r.samples[0].checks {
                println!("  {:<24} {:.3e}", c.name, c.worst_margin);
            }
        }
        Err(e) => println!("\nrejected: {e}"),
    }
    Ok(())
}
