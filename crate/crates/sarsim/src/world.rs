//! Ground truth: the mission area, the targets hidden in it, and seeded
//! generation of the three benchmark scenario families.
//!
//! Scenario files are TOML:
//!
//! ```toml
//! kind = "clustered"
//! seed = 42
//!
//! [area]
//! x_min = 0.0
//! y_min = 0.0
//! x_max = 200.0
//! y_max = 200.0
//!
//! [[targets]]
//! id = 0
//! x = 31.4
//! y = 15.9
//! ```
//!
//! Loading then saving a scenario reproduces the file; generating twice
//! from the same `(kind, params, seed)` yields identical scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

/// Cap on rejection-sampling attempts during target placement.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// A stationary ground object the vehicle is searching for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

impl Target {
    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Spatial family of a generated scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Targets grouped into a few tight clusters.
    Clustered,
    /// Many targets with a small minimum spacing.
    Abundant,
    /// Few targets with a large minimum spacing.
    Sparse,
    /// Hand-written or externally produced target list.
    Custom,
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScenarioKind::Clustered => "clustered",
            ScenarioKind::Abundant => "abundant",
            ScenarioKind::Sparse => "sparse",
            ScenarioKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Generation parameters for [`generate_scenario`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioParams {
    Clustered {
        clusters: u32,
        per_cluster: u32,
        /// Radius (m) within which a cluster's targets fall around its center.
        spread: f64,
    },
    Scattered {
        count: u32,
        /// Minimum pairwise distance (m) between targets.
        min_spacing: f64,
    },
}

impl ScenarioParams {
    /// Built-in sizes for each kind: clustered 2×4 with 5 m spread,
    /// abundant 25 targets at 8 m spacing, sparse 5 targets at 40 m spacing.
    pub fn default_for(kind: ScenarioKind) -> ScenarioParams {
        match kind {
            ScenarioKind::Clustered => ScenarioParams::Clustered {
                clusters: 2,
                per_cluster: 4,
                spread: 5.0,
            },
            ScenarioKind::Abundant => ScenarioParams::Scattered {
                count: 25,
                min_spacing: 8.0,
            },
            ScenarioKind::Sparse | ScenarioKind::Custom => ScenarioParams::Scattered {
                count: 5,
                min_spacing: 40.0,
            },
        }
    }

    fn validate(&self, kind: ScenarioKind) -> Result<()> {
        match (kind, self) {
            (ScenarioKind::Clustered, ScenarioParams::Clustered { clusters, per_cluster, spread }) => {
                if *clusters < 1 {
                    return Err(Error::param("clusters", "must be at least 1"));
                }
                if *per_cluster < 1 {
                    return Err(Error::param("per_cluster", "must be at least 1"));
                }
                if !(*spread > 0.0) {
                    return Err(Error::param("spread", "must be positive"));
                }
                Ok(())
            }
            (ScenarioKind::Abundant | ScenarioKind::Sparse, ScenarioParams::Scattered { min_spacing, .. }) => {
                if !(*min_spacing >= 0.0) {
                    return Err(Error::param("min_spacing", "must be non-negative"));
                }
                Ok(())
            }
            (ScenarioKind::Custom, _) => Err(Error::param(
                "kind",
                "custom scenarios are loaded from a file, not generated",
            )),
            (kind, _) => Err(Error::param(
                "params",
                format!("parameter block does not match scenario kind `{kind}`"),
            )),
        }
    }
}

/// The full simulated ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub area: Rect,
    pub targets: Vec<Target>,
}

impl Scenario {
    /// A scenario from an explicit target list.
    pub fn custom(area: Rect, positions: &[Point], seed: u64) -> Result<Self> {
        let targets: Vec<Target> = positions
            .iter()
            .enumerate()
            .map(|(i, p)| Target {
                id: i as u32,
                x: p.x,
                y: p.y,
            })
            .collect();
        for t in &targets {
            if !area.contains(t.position()) {
                return Err(Error::param(
                    "targets",
                    format!("target {} at {} lies outside the area", t.id, t.position()),
                ));
            }
        }
        Ok(Scenario {
            kind: ScenarioKind::Custom,
            seed,
            area,
            targets,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let scenario: Scenario =
            toml::from_str(s).map_err(|e| Error::malformed("scenario file", e))?;
        for t in &scenario.targets {
            if !scenario.area.contains(t.position()) {
                return Err(Error::malformed(
                    "scenario file",
                    format!("target {} lies outside the area", t.id),
                ));
            }
        }
        Ok(scenario)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }
}

/// Generate a scenario of the given kind. Deterministic in `seed`.
///
/// Clustered: cluster centers are drawn uniformly from the area inset by one
/// spread radius (so clusters never straddle the boundary), and each target
/// uniformly from the disk of radius `spread` around its center.
///
/// Abundant/Sparse: targets are drawn uniformly from the area, rejecting
/// draws closer than `min_spacing` to an accepted target. Placement aborts
/// with [`Error::PlacementFailed`] after [`MAX_PLACEMENT_ATTEMPTS`] draws.
pub fn generate_scenario(
    kind: ScenarioKind,
    area: Rect,
    params: &ScenarioParams,
    seed: u64,
) -> Result<Scenario> {
    params.validate(kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets = match *params {
        ScenarioParams::Clustered {
            clusters,
            per_cluster,
            spread,
        } => place_clustered(area, clusters, per_cluster, spread, &mut rng)?,
        ScenarioParams::Scattered { count, min_spacing } => {
            place_scattered(area, count, min_spacing, &mut rng)?
        }
    };
    Ok(Scenario {
        kind,
        seed,
        area,
        targets,
    })
}

fn uniform_point(area: Rect, rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        rng.gen_range(area.x_min..=area.x_max),
        rng.gen_range(area.y_min..=area.y_max),
    )
}

fn place_clustered(
    area: Rect,
    clusters: u32,
    per_cluster: u32,
    spread: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Target>> {
    let core = area.inset(spread).map_err(|_| {
        Error::param(
            "spread",
            format!(
                "spread {spread} m leaves no room for cluster centers in a {}x{} m area",
                area.width(),
                area.height()
            ),
        )
    })?;
    let centers: Vec<Point> = (0..clusters).map(|_| uniform_point(core, rng)).collect();
    let mut targets = Vec::with_capacity((clusters * per_cluster) as usize);
    let mut id = 0;
    for center in &centers {
        for _ in 0..per_cluster {
            // Uniform draw from the disk of radius `spread`.
            let r = spread * rng.gen::<f64>().sqrt();
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            targets.push(Target {
                id,
                x: center.x + r * theta.cos(),
                y: center.y + r * theta.sin(),
            });
            id += 1;
        }
    }
    Ok(targets)
}

fn place_scattered(
    area: Rect,
    count: u32,
    min_spacing: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Target>> {
    let mut placed: Vec<Point> = Vec::with_capacity(count as usize);
    let mut attempts = 0;
    while placed.len() < count as usize {
        if attempts >= MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::PlacementFailed {
                attempts,
                reason: format!(
                    "placed {} of {} targets; min_spacing {} m may be infeasible for a {}x{} m area",
                    placed.len(),
                    count,
                    min_spacing,
                    area.width(),
                    area.height()
                ),
            });
        }
        attempts += 1;
        let p = uniform_point(area, rng);
        if placed.iter().all(|q| q.distance(p) >= min_spacing) {
            placed.push(p);
        }
    }
    Ok(placed
        .into_iter()
        .enumerate()
        .map(|(i, p)| Target {
            id: i as u32,
            x: p.x,
            y: p.y,
        })
        .collect())
}

/// Targets whose positions lie inside or on the boundary of `region`,
/// in id order.
pub fn targets_in_region<'a>(scenario: &'a Scenario, region: &Rect) -> Vec<&'a Target> {
    scenario
        .targets
        .iter()
        .filter(|t| region.contains(t.position()))
        .collect()
}
