// Scratch harness: single run with event dump.

use std::path::Path;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let preset = args.get(1).map(|s| s.as_str()).unwrap_or("sparse");
    let strat_idx: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0);

    let spec = sarsim::ExperimentSpec::from_toml(sarsim::experiment::preset(preset).unwrap()).unwrap();
    let entry = &spec.strategies[strat_idx];
    let config = spec.run_config(Path::new("."), &entry.strategy, seed).unwrap();
    println!("targets:");
    for t in &config.scenario.targets {
        println!("  {} at ({:.1}, {:.1})", t.id, t.x, t.y);
    }
    let (result, trace) = sarsim::run_mission(&config).unwrap();
    println!(
        "strategy {} seed {}: {}\n  fpr={} vt={} dist={:.0}",
        entry.label(),
        seed,
        result.summary_line(),
        result.false_positives_rejected,
        result.vertical_transitions,
        result.distance_flown
    );
    for r in &trace.records {
        if r.event != sarsim::engine::TraceEvent::None && !r.detail.starts_with("detect:")
            || r.detail.contains("switch")
            || r.detail.contains("confirm")
            || r.detail.contains("discard")
            || r.detail.contains("dedup")
        {
            println!(
                "  t={:8.1} pos=({:6.1},{:6.1}) alt={:5.1} {:5} {}",
                r.time, r.position.x, r.position.y, r.altitude, r.mode.to_string(), r.detail
            );
        }
    }
}
