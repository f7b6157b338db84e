// Scratch harness: survey world seeds for cluster separation.

use sarsim::geometry::{Point, Rect};
use sarsim::world::{generate_scenario, ScenarioKind, ScenarioParams};

fn main() {
    let per_cluster = 10usize;
    let area = Rect::new(0.0, 0.0, 700.0, 80.0).unwrap();
    let params = ScenarioParams::Clustered {
        clusters: 2,
        per_cluster: per_cluster as u32,
        spread: 23.0,
    };
    // Lanes for a 700x80 area, zero overlap, 80x110 deg camera at 25 m.
    let lanes = [19.02, 60.97];
    let band_half = 25.0 * (55f64).to_radians().tan(); // ~35.7
    let contained = |c: Point| {
        lanes
            .iter()
            .any(|&lane| (c.y - lane).abs() + 23.0 <= band_half - 1.0)
    };
    for seed in 0..400u64 {
        let s = generate_scenario(ScenarioKind::Clustered, area, &params, seed).unwrap();
        let centroid = |ts: &[sarsim::Target]| {
            let n = ts.len() as f64;
            Point::new(
                ts.iter().map(|t| t.x).sum::<f64>() / n,
                ts.iter().map(|t| t.y).sum::<f64>() / n,
            )
        };
        let c1 = centroid(&s.targets[..per_cluster]);
        let c2 = centroid(&s.targets[per_cluster..]);
        let dx = (c1.x - c2.x).abs();
        if dx < 520.0 || !contained(c1) || !contained(c2) {
            continue;
        }
        println!(
            "seed {seed:>3}: dx={:>5.1} inter={:>6.1} c1=({:>5.1},{:>5.1}) c2=({:>5.1},{:>5.1})",
            dx,
            c1.distance(c2),
            c1.x,
            c1.y,
            c2.x,
            c2.y,
        );
    }
}
