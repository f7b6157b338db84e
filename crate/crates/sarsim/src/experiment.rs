//! Experiment specs and the sweep harness.
//!
//! An experiment spec is a single TOML file describing everything a batch
//! needs: the world (generated or loaded), the planner settings, the
//! vehicle and detector models, a list of strategies, and the seeds to run.
//! Three presets ship with the crate, one per benchmark scenario family.
//!
//! ```toml
//! name = "clustered"
//! seeds = { start = 0, count = 20 }
//!
//! [scenario]
//! kind = "clustered"
//! clusters = 2
//! per_cluster = 5
//! spread = 6.0
//!
//! [[strategy]]
//! name = "nc=1"
//! n_c = 1
//! d_c = "inf"
//! ```
//!
//! When the scenario block has no explicit `seed`, each run's seed also
//! regenerates the world, so a sweep samples strategy performance over many
//! worlds while every strategy sees the same world for a given seed.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run_mission, MissionResult, RunConfig};
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::mission::Strategy;
use crate::perception::DetectorModel;
use crate::planner::{plan_lawnmower, FlightPlan};
use crate::vehicle::{CameraModel, SpeedProfile};
use crate::world::{generate_scenario, Scenario, ScenarioKind, ScenarioParams};

/// Built-in experiment specs reproducing the three benchmark comparisons.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "clustered" => Some(include_str!("../presets/clustered.exp")),
        "abundant" => Some(include_str!("../presets/abundant.exp")),
        "sparse" => Some(include_str!("../presets/sparse.exp")),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 3] = ["clustered", "abundant", "sparse"];

/// Seeds as an explicit list or a contiguous range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Range { start, count } => (*start..start + count).collect(),
        }
    }
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::Range { start: 0, count: 1 }
    }
}

/// World description: a scenario file, or generation parameters. A missing
/// `seed` means "use each run's seed".
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    pub file: Option<PathBuf>,
    pub kind: Option<ScenarioKind>,
    pub seed: Option<u64>,
    pub area: Option<Rect>,
    pub clusters: Option<u32>,
    pub per_cluster: Option<u32>,
    pub spread: Option<f64>,
    pub count: Option<u32>,
    pub min_spacing: Option<f64>,
}

impl ScenarioSpec {
    pub fn default_area() -> Rect {
        Rect::new(0.0, 0.0, 200.0, 200.0).unwrap()
    }

    /// Generation parameters merged over the kind's defaults.
    pub fn params(&self, kind: ScenarioKind) -> ScenarioParams {
        match ScenarioParams::default_for(kind) {
            ScenarioParams::Clustered {
                clusters,
                per_cluster,
                spread,
            } => ScenarioParams::Clustered {
                clusters: self.clusters.unwrap_or(clusters),
                per_cluster: self.per_cluster.unwrap_or(per_cluster),
                spread: self.spread.unwrap_or(spread),
            },
            ScenarioParams::Scattered { count, min_spacing } => ScenarioParams::Scattered {
                count: self.count.unwrap_or(count),
                min_spacing: self.min_spacing.unwrap_or(min_spacing),
            },
        }
    }

    /// Materialize the scenario for one run.
    pub fn resolve(&self, base_dir: &Path, run_seed: u64) -> Result<Scenario> {
        if let Some(file) = &self.file {
            let path = if file.is_absolute() {
                file.clone()
            } else {
                base_dir.join(file)
            };
            return Scenario::load(&path);
        }
        let kind = self.kind.ok_or_else(|| {
            Error::param("scenario", "needs either a `file` or a `kind` to generate")
        })?;
        let area = self.area.unwrap_or_else(Self::default_area);
        let seed = self.seed.unwrap_or(run_seed);
        generate_scenario(kind, area, &self.params(kind), seed)
    }
}

/// Coverage plan settings: a plan file, or lawnmower generation over the
/// scenario area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerSpec {
    pub file: Option<PathBuf>,
    pub overlap: f64,
    /// Override for the ground swath width; defaults to the camera's
    /// narrower footprint dimension at the scan altitude.
    pub footprint_width: Option<f64>,
}

impl Default for PlannerSpec {
    fn default() -> Self {
        PlannerSpec {
            file: None,
            overlap: 0.2,
            footprint_width: None,
        }
    }
}

impl PlannerSpec {
    pub fn resolve(
        &self,
        base_dir: &Path,
        area: Rect,
        camera: &CameraModel,
        scan_altitude: f64,
    ) -> Result<FlightPlan> {
        if let Some(file) = &self.file {
            let path = if file.is_absolute() {
                file.clone()
            } else {
                base_dir.join(file)
            };
            return FlightPlan::load(&path);
        }
        let width = self
            .footprint_width
            .unwrap_or_else(|| camera.swath_width(scan_altitude));
        let mut plan = plan_lawnmower(area, width, self.overlap)?;
        plan.generated_for_altitude = Some(scan_altitude);
        Ok(plan)
    }
}

/// Camera block in degrees, the friendlier unit for config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraSpec {
    pub horizontal_fov_deg: f64,
    pub vertical_fov_deg: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        CameraSpec {
            horizontal_fov_deg: 80.0,
            vertical_fov_deg: 60.0,
        }
    }
}

impl CameraSpec {
    pub fn model(&self) -> Result<CameraModel> {
        CameraModel::from_degrees(self.horizontal_fov_deg, self.vertical_fov_deg)
    }
}

/// One strategy row of an experiment, optionally named.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub strategy: Strategy,
}

impl StrategyEntry {
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.strategy.label())
    }
}

/// A full batch experiment: scenario x strategies x seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub name: String,
    pub dt: f64,
    pub max_sim_time: f64,
    pub match_radius: f64,
    pub seeds: SeedSpec,
    /// Default output directory for sweep products.
    pub output: Option<PathBuf>,
    pub scenario: ScenarioSpec,
    pub planner: PlannerSpec,
    pub camera: CameraSpec,
    pub speeds: SpeedProfile,
    pub detector: DetectorModel,
    #[serde(rename = "strategy")]
    pub strategies: Vec<StrategyEntry>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            name: "experiment".to_string(),
            dt: 0.1,
            max_sim_time: 3600.0,
            match_radius: 3.0,
            seeds: SeedSpec::default(),
            output: None,
            scenario: ScenarioSpec::default(),
            planner: PlannerSpec::default(),
            camera: CameraSpec::default(),
            speeds: SpeedProfile::default(),
            detector: DetectorModel::default(),
            strategies: Vec::new(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml(s: &str) -> Result<Self> {
        let spec: ExperimentSpec =
            toml::from_str(s).map_err(|e| Error::malformed("experiment spec", e))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::param("strategy", "at least one strategy is required"));
        }
        if self.seeds.seeds().is_empty() {
            return Err(Error::param("seeds", "at least one seed is required"));
        }
        for entry in &self.strategies {
            entry.strategy.validate()?;
        }
        self.detector.validate()?;
        self.speeds.validate()?;
        self.camera.model()?;
        Ok(())
    }

    /// Build the run configuration for one (strategy, seed) pair.
    pub fn run_config(&self, base_dir: &Path, strategy: &Strategy, seed: u64) -> Result<RunConfig> {
        let scenario = self.scenario.resolve(base_dir, seed)?;
        let camera = self.camera.model()?;
        let plan = self
            .planner
            .resolve(base_dir, scenario.area, &camera, strategy.scan_altitude)?;
        Ok(RunConfig {
            scenario,
            plan,
            strategy: *strategy,
            speeds: self.speeds,
            camera,
            detector: self.detector,
            dt: self.dt,
            seed,
            max_sim_time: self.max_sim_time,
            match_radius: self.match_radius,
        })
    }
}

/// One run of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub strategy: String,
    pub seed: u64,
    pub outcome: std::result::Result<MissionResult, String>,
}

/// Per-strategy aggregate over the completed runs of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySummary {
    pub strategy: String,
    pub runs: usize,
    pub timeouts: usize,
    pub failures: usize,
    pub median_time: f64,
    pub mean_time: f64,
    pub min_time: f64,
    pub max_time: f64,
    pub mean_fp_confirmed: f64,
    pub mean_fp_rejected: f64,
    pub mean_recall: f64,
}

/// Complete sweep output: per-run rows in input order plus per-strategy
/// summaries in spec order.
#[derive(Debug, Clone)]
pub struct SweepResults {
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<StrategySummary>,
}

impl SweepResults {
    pub fn summary_for(&self, strategy: &str) -> Option<&StrategySummary> {
        self.summaries.iter().find(|s| s.strategy == strategy)
    }

    /// Per-run CSV.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from(
            "strategy,seed,completed,mission_time,confirmed,fp_confirmed,fp_rejected,recall,vertical_transitions,distance_flown,error\n",
        );
        for row in &self.rows {
            match &row.outcome {
                Ok(r) => out.push_str(&format!(
                    "{},{},{},{:.3},{},{},{},{:.4},{},{:.3},\n",
                    row.strategy,
                    row.seed,
                    r.completed,
                    r.mission_time,
                    r.confirmed.len(),
                    r.false_positives_confirmed,
                    r.false_positives_rejected,
                    r.recall,
                    r.vertical_transitions,
                    r.distance_flown
                )),
                Err(e) => out.push_str(&format!(
                    "{},{},false,,,,,,,,{}\n",
                    row.strategy,
                    row.seed,
                    e.replace(',', ";")
                )),
            }
        }
        out
    }

    /// Per-strategy CSV.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "strategy,runs,timeouts,failures,median_time,mean_time,min_time,max_time,mean_fp_confirmed,mean_fp_rejected,mean_recall\n",
        );
        for s in &self.summaries {
            out.push_str(&format!(
                "{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{:.4}\n",
                s.strategy,
                s.runs,
                s.timeouts,
                s.failures,
                s.median_time,
                s.mean_time,
                s.min_time,
                s.max_time,
                s.mean_fp_confirmed,
                s.mean_fp_rejected,
                s.mean_recall
            ));
        }
        out
    }

    /// Human-readable comparison table.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<14} {:>8} {:>14} {:>12} {:>12} {:>10} {:>9}\n",
            "strategy", "runs", "median time", "mean time", "fp confirm", "fp reject", "recall"
        ));
        for s in &self.summaries {
            out.push_str(&format!(
                "{:<14} {:>8} {:>14.2} {:>12.2} {:>12.2} {:>10.2} {:>9.3}\n",
                s.strategy,
                s.runs,
                s.median_time,
                s.mean_time,
                s.mean_fp_confirmed,
                s.mean_fp_rejected,
                s.mean_recall
            ));
        }
        out
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn summarize(strategy: &str, rows: &[&SweepRow]) -> StrategySummary {
    let completed: Vec<&MissionResult> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .filter(|m| m.completed)
        .collect();
    let timeouts = rows
        .iter()
        .filter(|r| matches!(&r.outcome, Ok(m) if !m.completed))
        .count();
    let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
    let mut times: Vec<f64> = completed.iter().map(|m| m.mission_time).collect();
    let n = completed.len().max(1) as f64;
    StrategySummary {
        strategy: strategy.to_string(),
        runs: rows.len(),
        timeouts,
        failures,
        median_time: median(&mut times),
        mean_time: completed.iter().map(|m| m.mission_time).sum::<f64>() / n,
        min_time: times.first().copied().unwrap_or(f64::NAN),
        max_time: times.last().copied().unwrap_or(f64::NAN),
        mean_fp_confirmed: completed
            .iter()
            .map(|m| m.false_positives_confirmed as f64)
            .sum::<f64>()
            / n,
        mean_fp_rejected: completed
            .iter()
            .map(|m| m.false_positives_rejected as f64)
            .sum::<f64>()
            / n,
        mean_recall: completed.iter().map(|m| m.recall).sum::<f64>() / n,
    }
}

/// Execute the full sweep: every strategy against every seed. Runs execute
/// in parallel (optionally bounded by `workers`); rows come back in
/// strategy-major, seed-minor order regardless of scheduling. Per-run
/// failures are recorded in their row and never abort the sweep.
pub fn run_sweep(
    spec: &ExperimentSpec,
    base_dir: &Path,
    workers: Option<usize>,
) -> Result<SweepResults> {
    spec.validate()?;
    let seeds = spec.seeds.seeds();
    let jobs: Vec<(usize, u64)> = (0..spec.strategies.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();

    let execute = || -> Vec<SweepRow> {
        jobs.par_iter()
            .map(|&(idx, seed)| {
                let entry = &spec.strategies[idx];
                let outcome = spec
                    .run_config(base_dir, &entry.strategy, seed)
                    .and_then(|config| run_mission(&config).map(|(result, _)| result))
                    .map_err(|e| e.to_string());
                SweepRow {
                    strategy: entry.label(),
                    seed,
                    outcome,
                }
            })
            .collect()
    };

    let rows = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::malformed("thread pool", e))?
            .install(execute),
        None => execute(),
    };

    let summaries = spec
        .strategies
        .iter()
        .map(|entry| {
            let label = entry.label();
            let selected: Vec<&SweepRow> = rows.iter().filter(|r| r.strategy == label).collect();
            summarize(&label, &selected)
        })
        .collect();

    Ok(SweepResults { rows, summaries })
}

/// Write `runs.csv`, `summary.csv`, and `summary.txt` under `dir`.
pub fn write_outputs(results: &SweepResults, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("runs.csv"), results.runs_csv())?;
    std::fs::write(dir.join("summary.csv"), results.summary_csv())?;
    std::fs::write(dir.join("summary.txt"), results.summary_table())?;
    Ok(())
}
