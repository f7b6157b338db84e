// Scratch harness: run the bundled presets and print per-strategy summaries
// plus per-seed orderings.

use std::path::Path;

fn main() {
    for name in sarsim::experiment::PRESET_NAMES {
        let spec = sarsim::ExperimentSpec::from_toml(sarsim::experiment::preset(name).unwrap())
            .expect("preset parses");
        let t0 = std::time::Instant::now();
        let results = sarsim::run_sweep(&spec, Path::new("."), None).expect("sweep runs");
        println!("== {name} ({:.2?}) ==", t0.elapsed());
        print!("{}", results.summary_table());

        // Per-seed comparison matrix.
        let labels: Vec<String> = spec.strategies.iter().map(|s| s.label()).collect();
        let seeds = spec.seeds.seeds();
        for seed in &seeds {
            print!("seed {seed:>3}: ");
            for label in &labels {
                let row = results
                    .rows
                    .iter()
                    .find(|r| r.strategy == *label && r.seed == *seed)
                    .unwrap();
                match &row.outcome {
                    Ok(m) => print!(
                        "{label}={:.1} (R={} fpc={} fpr={} rec={:.2})  ",
                        m.mission_time,
                        m.confirmed.len(),
                        m.false_positives_confirmed,
                        m.false_positives_rejected,
                        m.recall
                    ),
                    Err(e) => print!("{label}=ERR({e})  "),
                }
            }
            println!();
        }
        println!();
    }
}
