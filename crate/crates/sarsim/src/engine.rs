//! The closed simulation loop: sense → decide → act at a fixed timestep,
//! with trace recording, mission metrics, and an analytic time oracle for
//! testing.
//!
//! Each tick senses with the pre-step vehicle state, then lets the
//! controller and the kinematics consume the tick's time budget. When the
//! vehicle reaches its commanded waypoint mid-tick the controller is asked
//! again and the remaining budget flows into the next leg, so traversal
//! times are exact rather than quantized per segment. A run is a pure
//! function of its [`RunConfig`]: identical configs produce bit-identical
//! results and traces.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{angle_diff, Point};
use crate::mission::{Controller, ControlEvent, Mode, Strategy};
use crate::perception::{sense, Detection, DetectorModel};
use crate::planner::{path_length, FlightPlan};
use crate::vehicle::{advance, CameraModel, SpeedProfile, VehicleState, TURN_THRESHOLD};
use crate::world::Scenario;

/// Arrival tolerance (m) for waypoint and candidate resolution.
///
/// The kinematics clamp exactly onto the commanded target, so this only
/// guards against float dust. Keeping it well below one step length stops
/// the controller from popping waypoints early at tick boundaries, which
/// would shave a corner off every lane transition and drift the mission
/// time away from the analytic oracle.
pub const DEFAULT_WAYPOINT_TOLERANCE: f64 = 0.05;

/// Everything one run needs. `seed` drives the perception noise stream only;
/// the scenario carries its own generation seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub plan: FlightPlan,
    pub strategy: Strategy,
    pub speeds: SpeedProfile,
    pub camera: CameraModel,
    pub detector: DetectorModel,
    pub dt: f64,
    pub seed: u64,
    pub max_sim_time: f64,
    /// Distance (m) within which a confirmed position counts as a true
    /// target in the metrics.
    pub match_radius: f64,
}

impl RunConfig {
    pub fn new(scenario: Scenario, plan: FlightPlan, strategy: Strategy) -> Self {
        RunConfig {
            scenario,
            plan,
            strategy,
            speeds: SpeedProfile::default(),
            camera: CameraModel::default(),
            detector: DetectorModel::default(),
            dt: 0.1,
            seed: 0,
            max_sim_time: 3600.0,
            match_radius: 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::param("dt", "must be positive"));
        }
        if !(self.max_sim_time > 0.0) {
            return Err(Error::param("max_sim_time", "must be positive"));
        }
        if !(self.match_radius > 0.0) {
            return Err(Error::param("match_radius", "must be positive"));
        }
        if self.plan.waypoints.is_empty() {
            return Err(Error::EmptyPlan);
        }
        self.strategy.validate()?;
        self.speeds.validate()?;
        self.detector.validate()?;
        CameraModel::new(self.camera.horizontal_fov, self.camera.vertical_fov)?;
        Ok(())
    }

    /// Short hex digest of the full configuration, for result records.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// What happened during one trace step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    None,
    Detection,
    ModeSwitch,
    TargetConfirmed,
    TargetDiscarded,
    WaypointReached,
}

impl std::fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TraceEvent::None => "none",
            TraceEvent::Detection => "detection",
            TraceEvent::ModeSwitch => "mode_switch",
            TraceEvent::TargetConfirmed => "target_confirmed",
            TraceEvent::TargetDiscarded => "target_discarded",
            TraceEvent::WaypointReached => "waypoint_reached",
        })
    }
}

impl std::str::FromStr for TraceEvent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => TraceEvent::None,
            "detection" => TraceEvent::Detection,
            "mode_switch" => TraceEvent::ModeSwitch,
            "target_confirmed" => TraceEvent::TargetConfirmed,
            "target_discarded" => TraceEvent::TargetDiscarded,
            "waypoint_reached" => TraceEvent::WaypointReached,
            other => return Err(Error::malformed("trace event", other)),
        })
    }
}

/// One simulation step in the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time: f64,
    pub position: Point,
    pub altitude: f64,
    pub mode: Mode,
    pub event: TraceEvent,
    /// All step events, `|`-joined: `detect:2`, `switch->check`,
    /// `confirm:x;y`, `discard:x;y`, `wp:x;y`.
    pub detail: String,
}

/// Time-ordered record of a run, one record per step plus the initial
/// state. CSV export keeps every step with an event and every 10th quiet
/// step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    /// Sum of per-step 3-D displacements along the recorded path.
    pub fn distance_flown(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| {
                let dxy = w[0].position.distance(w[1].position);
                let dz = w[1].altitude - w[0].altitude;
                dxy.hypot(dz)
            })
            .sum()
    }

    fn keep_for_export(&self, idx: usize) -> bool {
        self.records[idx].event != TraceEvent::None
            || idx % 10 == 0
            || idx + 1 == self.records.len()
            || self.bends_at(idx)
    }

    /// Whether the flight direction changes at record `idx` (e.g. a climb
    /// finishing mid-step). Keeping these rows makes the exported polyline
    /// exactly as long as the full per-step one.
    fn bends_at(&self, idx: usize) -> bool {
        if idx == 0 || idx + 1 >= self.records.len() {
            return false;
        }
        let dir = |a: &TraceRecord, b: &TraceRecord| {
            let v = (
                b.position.x - a.position.x,
                b.position.y - a.position.y,
                b.altitude - a.altitude,
            );
            let len = (v.0 * v.0 + v.1 * v.1 + v.2 * v.2).sqrt();
            if len < 1e-12 {
                None
            } else {
                Some((v.0 / len, v.1 / len, v.2 / len))
            }
        };
        let before = dir(&self.records[idx - 1], &self.records[idx]);
        let after = dir(&self.records[idx], &self.records[idx + 1]);
        match (before, after) {
            (Some(a), Some(b)) => {
                let dot = a.0 * b.0 + a.1 * b.1 + a.2 * b.2;
                dot < 1.0 - 1e-9
            }
            _ => false,
        }
    }

    /// CSV with columns `t,x,y,alt,mode,event,detail`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("t,x,y,alt,mode,event,detail\n");
        for (i, r) in self.records.iter().enumerate() {
            if !self.keep_for_export(i) {
                continue;
            }
            out.push_str(&format!(
                "{:.3},{},{},{},{},{},{}\n",
                r.time, r.position.x, r.position.y, r.altitude, r.mode, r.event, r.detail
            ));
        }
        out
    }

    pub fn from_csv_str(s: &str) -> Result<Trace> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(s.as_bytes());
        let mut records = Vec::new();
        for row in rdr.records() {
            let row = row.map_err(|e| Error::malformed("trace csv", e))?;
            if row.len() < 7 {
                return Err(Error::malformed("trace csv", "expected 7 columns"));
            }
            let parse = |i: usize| -> Result<f64> {
                row[i]
                    .parse::<f64>()
                    .map_err(|e| Error::malformed("trace csv", e))
            };
            let mode = match &row[4] {
                "scan" => Mode::Scan,
                "check" => Mode::Check,
                other => return Err(Error::malformed("trace csv", format!("mode `{other}`"))),
            };
            records.push(TraceRecord {
                time: parse(0)?,
                position: Point::new(parse(1)?, parse(2)?),
                altitude: parse(3)?,
                mode,
                event: row[5].parse()?,
                detail: row[6].to_string(),
            });
        }
        Ok(Trace { records })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Trace> {
        Trace::from_csv_str(&std::fs::read_to_string(path)?)
    }

    fn count_detail(&self, prefix: &str) -> usize {
        self.records
            .iter()
            .flat_map(|r| r.detail.split('|'))
            .filter(|d| d.starts_with(prefix))
            .count()
    }
}

/// Outcome metrics of one mission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionResult {
    pub mission_time: f64,
    /// Confirmed rescue positions, in confirmation order.
    pub confirmed: Vec<Point>,
    /// Confirmed positions with no true target within the match radius.
    pub false_positives_confirmed: usize,
    /// Candidates visited in check mode and discarded unconfirmed.
    pub false_positives_rejected: usize,
    /// Fraction of true targets matched one-to-one by a confirmed position.
    pub recall: f64,
    /// Scan/check mode switches (each implies a climb or descent).
    pub vertical_transitions: usize,
    pub distance_flown: f64,
    pub completed: bool,
}

impl MissionResult {
    /// One-line summary used by the CLI.
    pub fn summary_line(&self) -> String {
        format!(
            "time={:.2} R={} fp={} recall={:.3}",
            self.mission_time,
            self.confirmed.len(),
            self.false_positives_confirmed,
            self.recall
        )
    }
}

/// Analytic scan-phase duration: climb from `initial_altitude` to
/// `scan_altitude`, then the plan's path length at scan speed, ignoring
/// detections. Computed without running the engine, as an independent
/// cross-check on detection-free missions.
pub fn oracle_scan_time(
    plan: &FlightPlan,
    speeds: &SpeedProfile,
    scan_altitude: f64,
    initial_altitude: f64,
) -> Result<f64> {
    let length = path_length(plan)?;
    let dz = scan_altitude - initial_altitude;
    let vertical = if dz > 0.0 {
        dz / speeds.climb_rate
    } else {
        -dz / speeds.descent_rate
    };
    Ok(vertical + length / speeds.scan_speed)
}

/// Metrics from a trace plus the confirmed list.
///
/// Confirmed positions and true targets are matched one-to-one, greedily by
/// distance (ties toward the lower target id), within `match_radius`.
/// Recall counts matched targets; confirmed false positives are the
/// confirmed entries left unmatched. An empty target list gives recall 1.
/// `mission_time` is taken from the last trace record and `completed`
/// defaults to true; [`run_mission`] overrides both.
pub fn compute_metrics(
    trace: &Trace,
    confirmed: &[Point],
    scenario: &Scenario,
    match_radius: f64,
) -> MissionResult {
    let (matched_targets, matched_confirmed) = match_confirmed(confirmed, scenario, match_radius);
    let recall = if scenario.targets.is_empty() {
        1.0
    } else {
        matched_targets as f64 / scenario.targets.len() as f64
    };
    MissionResult {
        mission_time: trace.records.last().map(|r| r.time).unwrap_or(0.0),
        confirmed: confirmed.to_vec(),
        false_positives_confirmed: confirmed.len() - matched_confirmed,
        false_positives_rejected: trace.count_detail("discard:"),
        recall,
        vertical_transitions: trace.count_detail("switch->"),
        distance_flown: trace.distance_flown(),
        completed: true,
    }
}

/// Greedy one-to-one matching; returns (matched targets, matched confirmed).
fn match_confirmed(confirmed: &[Point], scenario: &Scenario, match_radius: f64) -> (usize, usize) {
    let mut pairs = Vec::new();
    for (ci, c) in confirmed.iter().enumerate() {
        for t in &scenario.targets {
            let d = c.distance(t.position());
            if d <= match_radius {
                pairs.push((ci, t.id, d));
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.2.partial_cmp(&b.2)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.0.cmp(&b.0))
    });
    let mut used_confirmed = vec![false; confirmed.len()];
    let mut used_target = std::collections::HashSet::new();
    let mut matches = 0;
    for (ci, tid, _) in pairs {
        if used_confirmed[ci] || used_target.contains(&tid) {
            continue;
        }
        used_confirmed[ci] = true;
        used_target.insert(tid);
        matches += 1;
    }
    (matches, matches)
}

fn summarize_events(events: &[ControlEvent]) -> (TraceEvent, String) {
    let mut detections = 0usize;
    let mut parts = Vec::new();
    let mut best = TraceEvent::None;
    let consider = |candidate: TraceEvent, best: &mut TraceEvent| {
        let rank = |e: &TraceEvent| match e {
            TraceEvent::ModeSwitch => 5,
            TraceEvent::TargetConfirmed => 4,
            TraceEvent::TargetDiscarded => 3,
            TraceEvent::WaypointReached => 2,
            TraceEvent::Detection => 1,
            TraceEvent::None => 0,
        };
        if rank(&candidate) > rank(best) {
            *best = candidate;
        }
    };
    for event in events {
        match event {
            ControlEvent::DetectionIngested { .. } => {
                detections += 1;
                consider(TraceEvent::Detection, &mut best);
            }
            ControlEvent::ModeSwitch { to } => {
                parts.push(format!("switch->{to}"));
                consider(TraceEvent::ModeSwitch, &mut best);
            }
            ControlEvent::TargetConfirmed { position } => {
                parts.push(format!("confirm:{:.3};{:.3}", position.x, position.y));
                consider(TraceEvent::TargetConfirmed, &mut best);
            }
            ControlEvent::TargetDiscarded { position } => {
                parts.push(format!("discard:{:.3};{:.3}", position.x, position.y));
                consider(TraceEvent::TargetDiscarded, &mut best);
            }
            ControlEvent::WaypointReached { position } => {
                parts.push(format!("wp:{:.3};{:.3}", position.x, position.y));
                consider(TraceEvent::WaypointReached, &mut best);
            }
            ControlEvent::CandidateDropped { position } => {
                parts.push(format!("dedup:{:.3};{:.3}", position.x, position.y));
                consider(TraceEvent::WaypointReached, &mut best);
            }
        }
    }
    if detections > 0 {
        parts.insert(0, format!("detect:{detections}"));
    }
    (best, parts.join("|"))
}

/// Run one mission to completion or timeout.
///
/// The vehicle starts on the ground below the plan's first waypoint.
/// `mission_time` is the exact moment the final waypoint or candidate
/// resolves; on timeout the result is returned with `completed = false`.
pub fn run_mission(config: &RunConfig) -> Result<(MissionResult, Trace)> {
    config.validate()?;
    let dt = config.dt;
    let start = config.plan.waypoints[0];
    let mut vehicle = VehicleState::on_ground(start);
    if let Some(&second) = config.plan.waypoints.get(1) {
        vehicle.heading = start.bearing_to(second).unwrap_or(0.0);
    }
    let mut controller = Controller::new(
        &config.plan.waypoints,
        config.strategy,
        DEFAULT_WAYPOINT_TOLERANCE,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut trace = Trace::default();
    trace.records.push(TraceRecord {
        time: 0.0,
        position: vehicle.position,
        altitude: vehicle.altitude,
        mode: controller.mode(),
        event: TraceEvent::None,
        detail: String::new(),
    });

    let mut mission_time: Option<f64> = None;
    let mut tick: u64 = 0;

    while mission_time.is_none() {
        let tick_start = tick as f64 * dt;
        if tick_start + dt > config.max_sim_time + 1e-9 {
            break; // timeout
        }

        let detections = sense(
            &config.detector,
            &vehicle,
            &config.scenario,
            &config.camera,
            dt,
            &mut rng,
        );
        let heading_before = vehicle.heading;
        let mut events: Vec<ControlEvent> = Vec::new();
        let mut pending: &[Detection] = &detections;
        let mut remaining = dt;

        for _ in 0..64 {
            let out = controller.step(&vehicle, pending, &config.speeds)?;
            pending = &[];
            events.extend(out.events);
            let Some(cmd) = out.command else {
                mission_time = Some(tick_start + (dt - remaining));
                break;
            };
            let (next, used) = advance(&vehicle, &cmd.target(), &config.speeds, cmd.speed, remaining);
            vehicle = next;
            if used <= 1e-12 {
                // Holding position (dwell); the rest of the tick passes in
                // place.
                break;
            }
            remaining -= used;
            if remaining <= 1e-12 {
                break;
            }
        }

        tick += 1;
        vehicle.time = tick as f64 * dt;
        vehicle.turning =
            angle_diff(heading_before, vehicle.heading).abs() > TURN_THRESHOLD;

        let (event, detail) = summarize_events(&events);
        trace.records.push(TraceRecord {
            time: vehicle.time,
            position: vehicle.position,
            altitude: vehicle.altitude,
            mode: controller.mode(),
            event,
            detail,
        });
    }

    let confirmed: Vec<Point> = controller.confirmed().iter().map(|c| c.position).collect();
    let mut result = compute_metrics(&trace, &confirmed, &config.scenario, config.match_radius);
    debug_assert_eq!(result.false_positives_rejected, controller.discarded().len());
    debug_assert_eq!(result.vertical_transitions, controller.mode_switches());
    match mission_time {
        Some(t) => {
            result.mission_time = t;
            result.completed = true;
        }
        None => {
            result.mission_time = tick as f64 * dt;
            result.completed = false;
        }
    }
    Ok((result, trace))
}

/// One row of a batch run.
#[derive(Debug, Clone)]
pub struct BatchRow {
    pub config_index: usize,
    pub seed: u64,
    pub outcome: std::result::Result<MissionResult, String>,
}

/// Run the Cartesian product of `configs` and `seeds`, overriding each
/// config's seed. Runs execute in parallel but rows come back in input
/// order; failures and timeouts are recorded per row and never abort the
/// batch. Traces are dropped.
pub fn run_batch(configs: &[RunConfig], seeds: &[u64]) -> Vec<BatchRow> {
    let jobs: Vec<(usize, u64)> = configs
        .iter()
        .enumerate()
        .flat_map(|(i, _)| seeds.iter().map(move |&s| (i, s)))
        .collect();
    jobs.par_iter()
        .map(|&(config_index, seed)| {
            let mut config = configs[config_index].clone();
            config.seed = seed;
            let outcome = run_mission(&config)
                .map(|(result, _)| result)
                .map_err(|e| e.to_string());
            BatchRow {
                config_index,
                seed,
                outcome,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::plan_lawnmower;
    use crate::geometry::Rect;

    fn empty_scenario(w: f64, h: f64) -> Scenario {
        Scenario::custom(Rect::new(0.0, 0.0, w, h).unwrap(), &[], 0).unwrap()
    }

    fn quiet_detector() -> DetectorModel {
        DetectorModel {
            fp_rate_cruise: 0.0,
            ..DetectorModel::default()
        }
    }

    #[test]
    fn oracle_matches_hand_computation() {
        let plan = plan_lawnmower(Rect::new(0.0, 0.0, 100.0, 100.0).unwrap(), 25.0, 0.0).unwrap();
        let speeds = SpeedProfile::default();
        let t = oracle_scan_time(&plan, &speeds, 25.0, 0.0).unwrap();
        assert!((t - 107.5).abs() < 1e-9, "got {t}");

        // Doubling the scan speed halves the horizontal term exactly.
        let fast = SpeedProfile {
            scan_speed: 10.0,
            ..speeds
        };
        let t2 = oracle_scan_time(&plan, &fast, 25.0, 0.0).unwrap();
        assert!((t2 - (12.5 + 47.5)).abs() < 1e-9);

        // Single waypoint, already at altitude: zero.
        let single = FlightPlan {
            waypoints: vec![Point::new(0.0, 0.0)],
            lane_spacing: 25.0,
            generated_for_altitude: None,
        };
        assert_eq!(oracle_scan_time(&single, &speeds, 25.0, 25.0).unwrap(), 0.0);
    }

    #[test]
    fn detection_free_mission_matches_the_oracle() {
        let area = Rect::new(0.0, 0.0, 100.0, 100.0).unwrap();
        let plan = plan_lawnmower(area, 25.0, 0.0).unwrap();
        let config = RunConfig {
            detector: quiet_detector(),
            ..RunConfig::new(empty_scenario(100.0, 100.0), plan.clone(), Strategy::default())
        };
        let (result, trace) = run_mission(&config).unwrap();
        assert!(result.completed);
        let oracle = oracle_scan_time(&plan, &config.speeds, 25.0, 0.0).unwrap();
        assert!(
            (result.mission_time - oracle).abs() <= 2.0 * config.dt,
            "mission {} vs oracle {}",
            result.mission_time,
            oracle
        );
        assert_eq!(result.recall, 1.0);
        assert!(result.confirmed.is_empty());
        assert_eq!(result.vertical_transitions, 0);
        // Trace starts at zero and steps uniformly.
        assert_eq!(trace.records[0].time, 0.0);
        for w in trace.records.windows(2) {
            assert!((w[1].time - w[0].time - config.dt).abs() < 1e-9);
        }
    }

    #[test]
    fn perfect_detector_immediate_strategy_confirms_everything() {
        let area = Rect::new(0.0, 0.0, 100.0, 60.0).unwrap();
        let scenario = Scenario::custom(
            area,
            &[Point::new(30.0, 20.0), Point::new(70.0, 40.0)],
            0,
        )
        .unwrap();
        let plan = plan_lawnmower(area, 28.0, 0.2).unwrap();
        let config = RunConfig {
            detector: DetectorModel::perfect(),
            strategy: Strategy {
                merge_radius: 0.1,
                ..Strategy::default()
            },
            ..RunConfig::new(scenario, plan, Strategy::default())
        };
        let (result, _) = run_mission(&config).unwrap();
        assert!(result.completed);
        assert_eq!(result.recall, 1.0);
        assert_eq!(result.confirmed.len(), 2);
        assert_eq!(result.false_positives_confirmed, 0);
        assert_eq!(result.false_positives_rejected, 0);
        assert!(result.vertical_transitions >= 4);
    }

    #[test]
    fn rerun_is_bit_identical() {
        let area = Rect::new(0.0, 0.0, 120.0, 80.0).unwrap();
        let params = crate::world::ScenarioParams::Clustered {
            clusters: 2,
            per_cluster: 4,
            spread: 5.0,
        };
        let scenario =
            crate::world::generate_scenario(crate::world::ScenarioKind::Clustered, area, &params, 5)
                .unwrap();
        let plan = plan_lawnmower(area, 23.0, 0.2).unwrap();
        let config = RunConfig {
            seed: 99,
            strategy: Strategy {
                check_after_targets: crate::mission::CountLimit::Finite(5),
                check_after_distance: crate::mission::DistanceLimit::Finite(60.0),
                merge_radius: 5.0,
                ..Strategy::default()
            },
            ..RunConfig::new(scenario, plan, Strategy::default())
        };
        let (r1, t1) = run_mission(&config).unwrap();
        let (r2, t2) = run_mission(&config).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(t1.to_csv_string(), t2.to_csv_string());
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
    }

    #[test]
    fn metrics_examples() {
        let area = Rect::new(0.0, 0.0, 100.0, 100.0).unwrap();
        let scenario = Scenario::custom(
            area,
            &[Point::new(10.0, 10.0), Point::new(20.0, 20.0), Point::new(30.0, 30.0), Point::new(40.0, 40.0), Point::new(50.0, 50.0)],
            0,
        )
        .unwrap();
        let trace = Trace {
            records: vec![TraceRecord {
                time: 100.0,
                position: Point::new(0.0, 0.0),
                altitude: 0.0,
                mode: Mode::Scan,
                event: TraceEvent::None,
                detail: String::new(),
            }],
        };
        // Nothing confirmed, five targets: recall 0.
        let m = compute_metrics(&trace, &[], &scenario, 3.0);
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.false_positives_confirmed, 0);

        // Exact confirmations: recall 1, no false positives.
        let exact: Vec<Point> = scenario.targets.iter().map(|t| t.position()).collect();
        let m = compute_metrics(&trace, &exact, &scenario, 3.0);
        assert_eq!(m.recall, 1.0);
        assert_eq!(m.false_positives_confirmed, 0);
    }

    #[test]
    fn one_to_one_matching_between_close_targets() {
        // Two targets 1 m apart, a single confirmation between them: only
        // one target can match, so recall is 0.5 with no false positive.
        let area = Rect::new(0.0, 0.0, 10.0, 10.0).unwrap();
        let scenario = Scenario::custom(
            area,
            &[Point::new(4.5, 5.0), Point::new(5.5, 5.0)],
            0,
        )
        .unwrap();
        let trace = Trace { records: vec![] };
        let m = compute_metrics(&trace, &[Point::new(5.0, 5.0)], &scenario, 2.0);
        assert_eq!(m.recall, 0.5);
        assert_eq!(m.false_positives_confirmed, 0);

        // A confirmation with no target nearby counts as a confirmed false
        // positive.
        let m = compute_metrics(&trace, &[Point::new(9.0, 1.0)], &scenario, 2.0);
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.false_positives_confirmed, 1);
    }

    #[test]
    fn vacuous_recall_for_empty_target_set() {
        let trace = Trace { records: vec![] };
        let m = compute_metrics(&trace, &[], &empty_scenario(50.0, 50.0), 3.0);
        assert_eq!(m.recall, 1.0);
    }

    #[test]
    fn distance_flown_recomputes_exactly_from_the_trace() {
        let area = Rect::new(0.0, 0.0, 80.0, 50.0).unwrap();
        let scenario = Scenario::custom(area, &[Point::new(40.0, 25.0)], 0).unwrap();
        let plan = plan_lawnmower(area, 25.0, 0.2).unwrap();
        let config = RunConfig {
            detector: DetectorModel::perfect(),
            ..RunConfig::new(scenario, plan, Strategy::default())
        };
        let (result, trace) = run_mission(&config).unwrap();
        assert_eq!(result.distance_flown, trace.distance_flown());

        // The exported CSV keeps every step where the path can bend, so the
        // polyline through exported rows has the same length.
        let reloaded = Trace::from_csv_str(&trace.to_csv_string()).unwrap();
        assert!(
            (reloaded.distance_flown() - result.distance_flown).abs() < 1e-6,
            "csv {} vs reported {}",
            reloaded.distance_flown(),
            result.distance_flown
        );
        assert_eq!(
            reloaded.count_detail("switch->"),
            result.vertical_transitions
        );
    }

    #[test]
    fn timeout_reports_incomplete() {
        let area = Rect::new(0.0, 0.0, 500.0, 500.0).unwrap();
        let plan = plan_lawnmower(area, 25.0, 0.0).unwrap();
        let config = RunConfig {
            max_sim_time: 10.0,
            detector: quiet_detector(),
            ..RunConfig::new(empty_scenario(500.0, 500.0), plan, Strategy::default())
        };
        let (result, _) = run_mission(&config).unwrap();
        assert!(!result.completed);
        assert!(result.mission_time <= 10.0 + 1e-9);
    }

    #[test]
    fn batch_matches_single_runs_and_is_order_stable() {
        let area = Rect::new(0.0, 0.0, 90.0, 60.0).unwrap();
        let params = crate::world::ScenarioParams::Scattered {
            count: 3,
            min_spacing: 15.0,
        };
        let scenario =
            crate::world::generate_scenario(crate::world::ScenarioKind::Sparse, area, &params, 1)
                .unwrap();
        let plan = plan_lawnmower(area, 23.0, 0.2).unwrap();
        let config = RunConfig::new(scenario, plan, Strategy::default());

        let rows = run_batch(std::slice::from_ref(&config), &[7]);
        assert_eq!(rows.len(), 1);
        let mut single = config.clone();
        single.seed = 7;
        let (expected, _) = run_mission(&single).unwrap();
        assert_eq!(rows[0].outcome.as_ref().unwrap(), &expected);

        let seeds = [1u64, 2, 3];
        let a = run_batch(&[config.clone(), config.clone()], &seeds);
        let b = run_batch(&[config.clone(), config], &seeds);
        assert_eq!(a.len(), 6);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.config_index, y.config_index);
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.outcome, y.outcome);
        }
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let area = Rect::new(0.0, 0.0, 50.0, 50.0).unwrap();
        let plan = plan_lawnmower(area, 25.0, 0.0).unwrap();
        let config = RunConfig::new(empty_scenario(50.0, 50.0), plan, Strategy::default());
        assert_eq!(config.hash(), config.hash());
        let mut other = config.clone();
        other.seed = 1;
        assert_ne!(config.hash(), other.hash());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let area = Rect::new(0.0, 0.0, 50.0, 50.0).unwrap();
        let plan = plan_lawnmower(area, 25.0, 0.0).unwrap();
        let good = RunConfig::new(empty_scenario(50.0, 50.0), plan, Strategy::default());
        let mut bad = good.clone();
        bad.dt = 0.0;
        assert!(run_mission(&bad).is_err());
        let mut bad = good.clone();
        bad.plan.waypoints.clear();
        assert!(run_mission(&bad).is_err());
        let mut bad = good;
        bad.strategy.check_altitude = 30.0;
        assert!(run_mission(&bad).is_err());
    }
}
