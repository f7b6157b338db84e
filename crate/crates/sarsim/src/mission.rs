//! The scan/check mission controller.
//!
//! The vehicle follows a predetermined coverage plan at the scan altitude,
//! accumulating candidate target positions in a scanned list `S`. Two
//! triggers move it to check mode: the scanned list reaching
//! `check_after_targets`, or the vehicle traveling `check_after_distance`
//! past the last detection. In check mode it descends to the check altitude
//! and visits the pending list `C` one candidate at a time, confirming into
//! the rescue list `R` any candidate re-detected with confidence at or above
//! `confidence_threshold`, and discarding candidates that fail to confirm
//! within the dwell window. When `C` empties the vehicle climbs back and
//! resumes the sweep where it left it.
//!
//! Both triggers accept the literal token `inf`: `check_after_targets = 1`
//! checks every candidate immediately, while an infinite setting on both
//! defers all checking to a single terminal phase after the sweep.

use std::collections::VecDeque;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::perception::Detection;
use crate::vehicle::{at_waypoint, FlightTarget, SpeedProfile, VehicleState};

/// Controller flight mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Scan,
    Check,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Scan => "scan",
            Mode::Check => "check",
        })
    }
}

/// A count threshold that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountLimit {
    Finite(u32),
    Infinite,
}

impl CountLimit {
    pub fn reached(&self, n: usize) -> bool {
        match self {
            CountLimit::Finite(k) => n >= *k as usize,
            CountLimit::Infinite => false,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, CountLimit::Infinite)
    }
}

/// A distance threshold (meters) that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceLimit {
    Finite(f64),
    Infinite,
}

impl DistanceLimit {
    pub fn reached(&self, d: f64) -> bool {
        match self {
            DistanceLimit::Finite(limit) => d >= *limit,
            DistanceLimit::Infinite => false,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, DistanceLimit::Infinite)
    }
}

impl std::fmt::Display for CountLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CountLimit::Finite(k) => write!(f, "{k}"),
            CountLimit::Infinite => f.write_str("inf"),
        }
    }
}

impl std::fmt::Display for DistanceLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistanceLimit::Finite(d) => write!(f, "{d}"),
            DistanceLimit::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for CountLimit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if is_inf_token(s) {
            return Ok(CountLimit::Infinite);
        }
        s.parse::<u32>()
            .map(CountLimit::Finite)
            .map_err(|_| Error::param("count limit", format!("expected a count or `inf`, got `{s}`")))
    }
}

impl std::str::FromStr for DistanceLimit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if is_inf_token(s) {
            return Ok(DistanceLimit::Infinite);
        }
        match s.parse::<f64>() {
            Ok(d) if d.is_infinite() => Ok(DistanceLimit::Infinite),
            Ok(d) => Ok(DistanceLimit::Finite(d)),
            Err(_) => Err(Error::param(
                "distance limit",
                format!("expected meters or `inf`, got `{s}`"),
            )),
        }
    }
}

fn is_inf_token(s: &str) -> bool {
    matches!(s.trim().to_ascii_lowercase().as_str(), "inf" | "infinity")
}

impl Serialize for CountLimit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CountLimit::Finite(k) => serializer.serialize_u32(*k),
            CountLimit::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CountLimit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = CountLimit;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a positive integer or the token `inf`")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<CountLimit, E> {
                u32::try_from(v)
                    .map(CountLimit::Finite)
                    .map_err(|_| E::custom("count out of range"))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<CountLimit, E> {
                u32::try_from(v)
                    .map(CountLimit::Finite)
                    .map_err(|_| E::custom("count out of range"))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<CountLimit, E> {
                if v.is_infinite() && v > 0.0 {
                    Ok(CountLimit::Infinite)
                } else {
                    Err(E::custom("expected an integer count or `inf`"))
                }
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<CountLimit, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

impl Serialize for DistanceLimit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DistanceLimit::Finite(d) => serializer.serialize_f64(*d),
            DistanceLimit::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for DistanceLimit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = DistanceLimit;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a distance in meters or the token `inf`")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<DistanceLimit, E> {
                Ok(DistanceLimit::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<DistanceLimit, E> {
                Ok(DistanceLimit::Finite(v as f64))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<DistanceLimit, E> {
                if v.is_infinite() {
                    Ok(DistanceLimit::Infinite)
                } else {
                    Ok(DistanceLimit::Finite(v))
                }
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<DistanceLimit, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Order in which pending candidates are visited in check mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckOrder {
    /// Greedy nearest-neighbor chain from the switch position (ties broken
    /// by insertion order).
    #[default]
    NearestNeighbor,
    /// Discovery order, for ablation.
    Discovery,
}

/// Tunable strategy parameters. In configuration files the switching
/// thresholds also parse under their short names `n_c` and `d_c`, and both
/// accept the literal token `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Strategy {
    /// Scan (high) altitude, m.
    pub scan_altitude: f64,
    /// Check (low) altitude, m.
    pub check_altitude: f64,
    /// Scanned candidates to accumulate before switching to check mode.
    #[serde(alias = "n_c")]
    pub check_after_targets: CountLimit,
    /// Travel allowed past the last detection before switching, m.
    #[serde(alias = "d_c")]
    pub check_after_distance: DistanceLimit,
    /// Confidence required to confirm a candidate in check mode.
    #[serde(alias = "c_t")]
    pub confidence_threshold: f64,
    /// Detections within this distance of a known candidate merge into it.
    pub merge_radius: f64,
    /// Hover time over an unconfirmed candidate before discarding it, s.
    pub dwell_time: f64,
    pub check_order: CheckOrder,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy {
            scan_altitude: 25.0,
            check_altitude: 5.0,
            check_after_targets: CountLimit::Finite(1),
            check_after_distance: DistanceLimit::Infinite,
            confidence_threshold: 0.8,
            merge_radius: 3.0,
            dwell_time: 2.0,
            check_order: CheckOrder::NearestNeighbor,
        }
    }
}

impl Strategy {
    pub fn validate(&self) -> Result<()> {
        if !(self.scan_altitude > self.check_altitude && self.check_altitude > 0.0) {
            return Err(Error::param(
                "scan_altitude/check_altitude",
                "need scan_altitude > check_altitude > 0",
            ));
        }
        if let CountLimit::Finite(k) = self.check_after_targets {
            if k < 1 {
                return Err(Error::param("check_after_targets", "must be at least 1"));
            }
        }
        if let DistanceLimit::Finite(d) = self.check_after_distance {
            if !(d > 0.0) {
                return Err(Error::param("check_after_distance", "must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(Error::param("confidence_threshold", "must be in [0, 1]"));
        }
        if !(self.merge_radius >= 0.0) {
            return Err(Error::param("merge_radius", "must be non-negative"));
        }
        if !(self.dwell_time >= 0.0) {
            return Err(Error::param("dwell_time", "must be non-negative"));
        }
        Ok(())
    }

    /// Short label for result tables, e.g. `nc=5` or `nc=inf,dc=40`.
    pub fn label(&self) -> String {
        if self.check_after_distance.is_infinite() {
            format!("nc={}", self.check_after_targets)
        } else {
            format!(
                "nc={},dc={}",
                self.check_after_targets, self.check_after_distance
            )
        }
    }
}

/// A candidate position with the best confidence seen for it so far, plus
/// the std-dev of the estimate it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub position: Point,
    pub confidence: f64,
    pub sigma: f64,
}

/// The 3-D goal plus commanded speed emitted each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaypointCommand {
    pub x: f64,
    pub y: f64,
    pub altitude: f64,
    pub speed: f64,
}

impl WaypointCommand {
    pub fn target(&self) -> FlightTarget {
        FlightTarget::new(self.x, self.y, self.altitude)
    }
}

/// Notable things a controller step did, in order of occurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlEvent {
    DetectionIngested { position: Point },
    ModeSwitch { to: Mode },
    TargetConfirmed { position: Point },
    TargetDiscarded { position: Point },
    WaypointReached { position: Point },
    /// A pending candidate turned out to duplicate an already-resolved
    /// position and was dropped without a visit.
    CandidateDropped { position: Point },
}

/// Result of one controller step.
#[derive(Debug, Clone)]
pub struct StepOutput {
    /// Where to fly next; `None` once the mission is complete.
    pub command: Option<WaypointCommand>,
    pub events: Vec<ControlEvent>,
}

/// The mission state machine. One controller instance drives exactly one
/// mission; all mutation happens through [`Controller::step`] and the
/// bookkeeping operations it delegates to.
#[derive(Debug, Clone)]
pub struct Controller {
    strategy: Strategy,
    waypoint_tolerance: f64,
    mode: Mode,
    plan: VecDeque<Point>,
    scanned: Vec<Candidate>,
    to_check: VecDeque<Candidate>,
    confirmed: Vec<Candidate>,
    discarded: Vec<Candidate>,
    last_detection_at: Option<Point>,
    dist_traveled: f64,
    arrived_at: Option<f64>,
    current_confirmed: bool,
    rejoin_pending: bool,
    scanned_ever: usize,
    check_ever: usize,
    mode_switches: usize,
}

impl Controller {
    pub fn new(plan: &[Point], strategy: Strategy, waypoint_tolerance: f64) -> Result<Self> {
        strategy.validate()?;
        if plan.is_empty() {
            return Err(Error::EmptyPlan);
        }
        if !(waypoint_tolerance > 0.0) {
            return Err(Error::param("waypoint_tolerance", "must be positive"));
        }
        Ok(Controller {
            strategy,
            waypoint_tolerance,
            mode: Mode::Scan,
            plan: plan.iter().copied().collect(),
            scanned: Vec::new(),
            to_check: VecDeque::new(),
            confirmed: Vec::new(),
            discarded: Vec::new(),
            last_detection_at: None,
            dist_traveled: 0.0,
            arrived_at: None,
            current_confirmed: false,
            rejoin_pending: false,
            scanned_ever: 0,
            check_ever: 0,
            mode_switches: 0,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Mission is complete when the plan, the scanned list, and the pending
    /// check list are all empty.
    pub fn complete(&self) -> bool {
        self.plan.is_empty() && self.scanned.is_empty() && self.to_check.is_empty()
    }

    /// Confirmed rescue positions (`R`).
    pub fn confirmed(&self) -> &[Candidate] {
        &self.confirmed
    }

    /// Candidates discarded after failing to confirm.
    pub fn discarded(&self) -> &[Candidate] {
        &self.discarded
    }

    pub fn scanned(&self) -> &[Candidate] {
        &self.scanned
    }

    pub fn pending_checks(&self) -> usize {
        self.to_check.len()
    }

    pub fn plan_remaining(&self) -> usize {
        self.plan.len()
    }

    /// Total entries ever appended to the scanned list.
    pub fn scanned_ever(&self) -> usize {
        self.scanned_ever
    }

    /// Total entries ever moved into the check list.
    pub fn check_ever(&self) -> usize {
        self.check_ever
    }

    pub fn mode_switches(&self) -> usize {
        self.mode_switches
    }

    pub fn dist_traveled(&self) -> f64 {
        self.dist_traveled
    }

    /// Merge a scan-mode detection into the scanned list (keeping the
    /// higher-confidence position when it lands within the merge gate of
    /// an existing candidate), then reset the travel trigger to the current
    /// vehicle position.
    ///
    /// The merge gate is the merge radius widened by the combined estimate
    /// uncertainty, so one target seen over many noisy high-altitude frames
    /// collapses into a single candidate instead of a cloud of duplicates.
    /// For noise-free detections the gate is exactly the merge radius.
    pub fn handle_scanned_target(&mut self, detection: &Detection, vehicle_position: Point) {
        let pos = detection.estimated_position;
        let base = self.strategy.merge_radius;
        let sigma = detection.position_sigma;
        match self
            .scanned
            .iter_mut()
            .find(|c| c.position.distance(pos) <= base + 3.0 * sigma.hypot(c.sigma))
        {
            Some(existing) => {
                if detection.confidence > existing.confidence {
                    existing.position = pos;
                    existing.confidence = detection.confidence;
                    existing.sigma = detection.position_sigma;
                }
            }
            None => {
                self.scanned.push(Candidate {
                    position: pos,
                    confidence: detection.confidence,
                    sigma: detection.position_sigma,
                });
                self.scanned_ever += 1;
            }
        }
        self.last_detection_at = Some(vehicle_position);
        self.dist_traveled = 0.0;
    }

    /// Distance traveled since the last detection; stays zero until a first
    /// detection anchors the measurement.
    pub fn update_travel(&mut self, current_position: Point) {
        if let Some(last) = self.last_detection_at {
            self.dist_traveled = last.distance(current_position);
        }
    }

    /// True when either switching trigger fires, or when the plan is
    /// exhausted with candidates still unchecked (the terminal check phase).
    pub fn should_switch_to_check(&self) -> bool {
        self.strategy.check_after_distance.reached(self.dist_traveled)
            || self.strategy.check_after_targets.reached(self.scanned.len())
            || (self.plan.is_empty() && !self.scanned.is_empty())
    }

    /// Move all scanned candidates to the check list, ordered from `from`,
    /// and enter check mode. Rejected when the scanned list is empty.
    pub fn switch_to_check(&mut self, from: Point) -> Result<()> {
        if self.scanned.is_empty() {
            return Err(Error::EmptyScanList);
        }
        let ordered = match self.strategy.check_order {
            CheckOrder::NearestNeighbor => nearest_neighbor_chain(from, &self.scanned),
            CheckOrder::Discovery => self.scanned.clone(),
        };
        self.check_ever += ordered.len();
        self.to_check = ordered.into();
        self.scanned.clear();
        self.dist_traveled = 0.0;
        self.last_detection_at = None;
        self.mode = Mode::Check;
        self.mode_switches += 1;
        self.reset_candidate_state();
        Ok(())
    }

    /// Check-mode detection handling: a detection within the merge radius of
    /// the current candidate whose confidence meets the threshold confirms
    /// it into the rescue list, exactly once. Later qualifying detections
    /// refine the stored position toward the highest-confidence estimate
    /// seen before the candidate is popped.
    pub fn handle_checked_target(&mut self, detections: &[Detection]) -> Vec<ControlEvent> {
        let mut events = Vec::new();
        let Some(front) = self.to_check.front() else {
            return events;
        };
        let mut best: Option<&Detection> = None;
        for det in detections {
            if det.estimated_position.distance(front.position) <= self.strategy.merge_radius
                && det.confidence >= self.strategy.confidence_threshold
                && best.is_none_or(|b| det.confidence > b.confidence)
            {
                best = Some(det);
            }
        }
        if let Some(det) = best {
            if !self.current_confirmed {
                self.current_confirmed = true;
                self.confirmed.push(Candidate {
                    position: det.estimated_position,
                    confidence: det.confidence,
                    sigma: det.position_sigma,
                });
                events.push(ControlEvent::TargetConfirmed {
                    position: det.estimated_position,
                });
            } else if let Some(entry) = self.confirmed.last_mut() {
                if det.confidence > entry.confidence {
                    entry.position = det.estimated_position;
                    entry.confidence = det.confidence;
                    entry.sigma = det.position_sigma;
                }
            }
        }
        events
    }

    fn reset_candidate_state(&mut self) {
        self.arrived_at = None;
        self.current_confirmed = false;
    }

    /// True when `position` duplicates an already-resolved candidate.
    ///
    /// Confirmed positions guard a gate widened by the combined estimate
    /// uncertainty: a confirmed target keeps emitting detections on later
    /// passes, and a noisy high-altitude re-detection must not leak back in
    /// as a fresh candidate. Discarded positions only certify that the
    /// small low-altitude footprint around the visited point was empty, so
    /// they guard the bare merge radius — a true target whose first check
    /// missed (a bad estimate) stays re-ingestible and gets a second check.
    fn resolved_nearby(&self, position: Point, sigma: f64) -> bool {
        let base = self.strategy.merge_radius;
        self.confirmed
            .iter()
            .any(|c| c.position.distance(position) <= base + 3.0 * sigma.hypot(c.sigma))
            || self
                .discarded
                .iter()
                .any(|c| c.position.distance(position) <= base)
    }

    fn current_command(&self, speeds: &SpeedProfile) -> Option<WaypointCommand> {
        match self.mode {
            Mode::Scan => self.plan.front().map(|wp| WaypointCommand {
                x: wp.x,
                y: wp.y,
                altitude: self.strategy.scan_altitude,
                speed: speeds.scan_speed,
            }),
            Mode::Check => self.to_check.front().map(|c| WaypointCommand {
                x: c.position.x,
                y: c.position.y,
                altitude: self.strategy.check_altitude,
                speed: speeds.check_speed,
            }),
        }
    }

    /// One controller iteration: ingest this step's detections, evaluate
    /// the mode triggers, pop reached waypoints or resolved candidates, and
    /// emit the next waypoint command. Returns `Err` once the mission has
    /// already completed; the completing step itself returns `command:
    /// None`.
    ///
    /// Detections already resolved (confirmed or discarded) are ignored in
    /// scan mode so the mission cannot re-check the same spot forever.
    pub fn step(
        &mut self,
        vehicle: &VehicleState,
        detections: &[Detection],
        speeds: &SpeedProfile,
    ) -> Result<StepOutput> {
        if self.complete() {
            return Err(Error::MissionComplete);
        }
        let mut events = Vec::new();
        match self.mode {
            Mode::Scan => {
                let mut ingested = false;
                for det in detections {
                    if self.resolved_nearby(det.estimated_position, det.position_sigma) {
                        continue;
                    }
                    self.handle_scanned_target(det, vehicle.position);
                    events.push(ControlEvent::DetectionIngested {
                        position: det.estimated_position,
                    });
                    ingested = true;
                }
                if !ingested {
                    self.update_travel(vehicle.position);
                }

                if self.should_switch_to_check() && !self.scanned.is_empty() {
                    if !self.plan.is_empty() && !self.rejoin_pending {
                        // Re-enter the sweep where it was left so the detour
                        // cannot open a coverage gap. One pending re-entry
                        // point covers a whole chain of excursions: the
                        // in-between wandering happens off the lane and
                        // needs no re-coverage.
                        self.plan.push_front(vehicle.position);
                        self.rejoin_pending = true;
                    }
                    self.switch_to_check(vehicle.position)?;
                    events.push(ControlEvent::ModeSwitch { to: Mode::Check });
                    return Ok(StepOutput {
                        command: self.current_command(speeds),
                        events,
                    });
                }

                if let Some(&wp) = self.plan.front() {
                    let goal = FlightTarget {
                        position: wp,
                        altitude: self.strategy.scan_altitude,
                    };
                    if at_waypoint(vehicle, &goal, self.waypoint_tolerance) {
                        self.plan.pop_front();
                        // A pending re-entry point always sits at the front,
                        // so the first pop clears it.
                        self.rejoin_pending = false;
                        events.push(ControlEvent::WaypointReached { position: wp });
                        if self.plan.is_empty() && !self.scanned.is_empty() {
                            // Terminal check phase for everything still
                            // unvisited.
                            self.switch_to_check(vehicle.position)?;
                            events.push(ControlEvent::ModeSwitch { to: Mode::Check });
                        }
                    }
                }
                Ok(StepOutput {
                    command: self.current_command(speeds),
                    events,
                })
            }
            Mode::Check => {
                // Drop pending candidates that duplicate a position resolved
                // earlier in this same check phase. A candidate whose own
                // confirmation is already in the rescue list is exempt: it
                // still has to be flown to and popped on arrival.
                while let Some(front) = self.to_check.front().copied() {
                    if !self.current_confirmed && self.resolved_nearby(front.position, front.sigma)
                    {
                        self.to_check.pop_front();
                        self.reset_candidate_state();
                        events.push(ControlEvent::CandidateDropped {
                            position: front.position,
                        });
                    } else {
                        break;
                    }
                }

                events.extend(self.handle_checked_target(detections));

                if let Some(front) = self.to_check.front().copied() {
                    let goal = FlightTarget {
                        position: front.position,
                        altitude: self.strategy.check_altitude,
                    };
                    if at_waypoint(vehicle, &goal, self.waypoint_tolerance) {
                        if self.current_confirmed {
                            self.to_check.pop_front();
                            self.reset_candidate_state();
                            events.push(ControlEvent::WaypointReached {
                                position: front.position,
                            });
                        } else {
                            let arrived = *self.arrived_at.get_or_insert(vehicle.time);
                            if vehicle.time - arrived >= self.strategy.dwell_time {
                                self.discarded.push(front);
                                self.to_check.pop_front();
                                self.reset_candidate_state();
                                events.push(ControlEvent::TargetDiscarded {
                                    position: front.position,
                                });
                            }
                        }
                    }
                }

                if self.to_check.is_empty() {
                    self.mode = Mode::Scan;
                    self.mode_switches += 1;
                    events.push(ControlEvent::ModeSwitch { to: Mode::Scan });
                }
                Ok(StepOutput {
                    command: self.current_command(speeds),
                    events,
                })
            }
        }
    }
}

/// Greedy nearest-neighbor ordering of `candidates` starting from `from`.
/// Ties break toward the lower insertion index.
fn nearest_neighbor_chain(from: Point, candidates: &[Candidate]) -> Vec<Candidate> {
    let mut remaining: Vec<(usize, Candidate)> = candidates.iter().copied().enumerate().collect();
    let mut ordered = Vec::with_capacity(remaining.len());
    let mut cursor = from;
    while !remaining.is_empty() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, (_, c)) in remaining.iter().enumerate() {
            let d = cursor.distance(c.position);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        let (_, chosen) = remaining.remove(best);
        cursor = chosen.position;
        ordered.push(chosen);
    }
    ordered
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(x: f64, y: f64, confidence: f64) -> Detection {
        Detection {
            estimated_position: Point::new(x, y),
            confidence,
            position_sigma: 0.0,
            timestamp: 0.0,
            source_target_id: None,
        }
    }

    fn controller(strategy: Strategy) -> Controller {
        let plan = [Point::new(0.0, 0.0), Point::new(100.0, 0.0)];
        Controller::new(&plan, strategy, 0.5).unwrap()
    }

    fn scanning_vehicle(x: f64, y: f64, strategy: &Strategy) -> VehicleState {
        VehicleState {
            altitude: strategy.scan_altitude,
            ..VehicleState::on_ground(Point::new(x, y))
        }
    }

    #[test]
    fn scanned_target_bookkeeping() {
        let s = Strategy {
            merge_radius: 2.0,
            check_after_targets: CountLimit::Infinite,
            ..Strategy::default()
        };
        let mut c = controller(s);

        c.handle_scanned_target(&det(10.0, 0.0, 0.7), Point::new(8.0, 0.0));
        assert_eq!(c.scanned().len(), 1);
        assert_eq!(c.dist_traveled(), 0.0);

        // 0.5 m away merges; the higher-confidence estimate wins.
        c.handle_scanned_target(&det(10.5, 0.0, 0.9), Point::new(8.5, 0.0));
        assert_eq!(c.scanned().len(), 1);
        assert_eq!(c.scanned()[0].position, Point::new(10.5, 0.0));
        assert_eq!(c.scanned()[0].confidence, 0.9);

        // A lower-confidence repeat merges without displacing the estimate.
        c.handle_scanned_target(&det(10.2, 0.0, 0.3), Point::new(8.6, 0.0));
        assert_eq!(c.scanned().len(), 1);
        assert_eq!(c.scanned()[0].position, Point::new(10.5, 0.0));

        // 3 m from the nearest entry appends.
        c.handle_scanned_target(&det(13.5, 0.0, 0.8), Point::new(9.0, 0.0));
        assert_eq!(c.scanned().len(), 2);
        assert_eq!(c.scanned_ever(), 2);
    }

    #[test]
    fn travel_distance_updates() {
        let mut c = controller(Strategy::default());
        // Without a last detection the travel distance stays zero.
        c.update_travel(Point::new(30.0, 40.0));
        assert_eq!(c.dist_traveled(), 0.0);

        c.handle_scanned_target(&det(0.0, 0.0, 0.9), Point::new(0.0, 0.0));
        c.update_travel(Point::new(30.0, 40.0));
        assert_eq!(c.dist_traveled(), 50.0);
        c.update_travel(Point::new(0.0, 0.0));
        assert_eq!(c.dist_traveled(), 0.0);
    }

    #[test]
    fn switch_trigger_logic() {
        // One scanned target with the immediate strategy.
        let mut c = controller(Strategy::default());
        c.handle_scanned_target(&det(5.0, 0.0, 0.9), Point::new(5.0, 0.0));
        assert!(c.should_switch_to_check());

        // Both limits infinite: never switch while the plan remains.
        let s = Strategy {
            check_after_targets: CountLimit::Infinite,
            check_after_distance: DistanceLimit::Infinite,
            ..Strategy::default()
        };
        let mut c = controller(s);
        for i in 0..100 {
            c.handle_scanned_target(&det(i as f64 * 10.0, 0.0, 0.9), Point::new(i as f64 * 10.0, 0.0));
        }
        assert_eq!(c.scanned().len(), 100);
        assert!(!c.should_switch_to_check());

        // Four of five accumulated, distance below the limit: no switch.
        let s = Strategy {
            check_after_targets: CountLimit::Finite(5),
            check_after_distance: DistanceLimit::Finite(50.0),
            ..Strategy::default()
        };
        let mut c = controller(s);
        for i in 0..4 {
            c.handle_scanned_target(&det(i as f64 * 10.0, 0.0, 0.9), Point::new(i as f64 * 10.0, 0.0));
        }
        c.update_travel(Point::new(49.0, 0.0));
        assert!(!c.should_switch_to_check());
        c.update_travel(Point::new(80.0, 0.0));
        assert!(c.should_switch_to_check());
    }

    #[test]
    fn switching_orders_candidates_nearest_first() {
        let mut c = controller(Strategy {
            check_after_targets: CountLimit::Infinite,
            ..Strategy::default()
        });
        c.handle_scanned_target(&det(50.0, 0.0, 0.9), Point::new(0.0, 0.0)); // far
        c.handle_scanned_target(&det(10.0, 0.0, 0.9), Point::new(0.0, 0.0)); // near
        c.switch_to_check(Point::new(0.0, 0.0)).unwrap();
        assert_eq!(c.mode(), Mode::Check);
        assert_eq!(c.pending_checks(), 2);
        assert!(c.scanned().is_empty());
        assert_eq!(c.dist_traveled(), 0.0);
        // Nearest (10, 0) first.
        let first = c.current_command(&SpeedProfile::default()).unwrap();
        assert_eq!(first.x, 10.0);
        assert_eq!(first.altitude, Strategy::default().check_altitude);
    }

    #[test]
    fn switching_with_empty_scan_list_is_rejected() {
        let mut c = controller(Strategy::default());
        let before = c.clone();
        let err = c.switch_to_check(Point::new(0.0, 0.0));
        assert!(matches!(err, Err(Error::EmptyScanList)));
        assert_eq!(c.mode(), before.mode());
        assert_eq!(c.pending_checks(), 0);
    }

    #[test]
    fn discovery_order_is_available() {
        let mut c = controller(Strategy {
            check_after_targets: CountLimit::Infinite,
            check_order: CheckOrder::Discovery,
            ..Strategy::default()
        });
        c.handle_scanned_target(&det(50.0, 0.0, 0.9), Point::new(0.0, 0.0));
        c.handle_scanned_target(&det(10.0, 0.0, 0.9), Point::new(0.0, 0.0));
        c.switch_to_check(Point::new(0.0, 0.0)).unwrap();
        let first = c.current_command(&SpeedProfile::default()).unwrap();
        assert_eq!(first.x, 50.0);
    }

    #[test]
    fn checked_target_confirmation_threshold() {
        let strategy = Strategy::default();
        let mut c = controller(strategy);
        c.handle_scanned_target(&det(20.0, 0.0, 0.9), Point::new(15.0, 0.0));
        c.switch_to_check(Point::new(15.0, 0.0)).unwrap();

        // Confidence above the threshold confirms once.
        let events = c.handle_checked_target(&[det(20.2, 0.0, 0.95)]);
        assert_eq!(c.confirmed().len(), 1);
        assert!(matches!(events[0], ControlEvent::TargetConfirmed { .. }));
        let again = c.handle_checked_target(&[det(20.1, 0.0, 0.99)]);
        assert!(again.is_empty(), "confirmation happens exactly once");
        assert_eq!(c.confirmed().len(), 1);
    }

    #[test]
    fn low_confidence_never_confirms() {
        let mut c = controller(Strategy::default());
        c.handle_scanned_target(&det(20.0, 0.0, 0.9), Point::new(15.0, 0.0));
        c.switch_to_check(Point::new(15.0, 0.0)).unwrap();
        let events = c.handle_checked_target(&[det(20.0, 0.0, 0.5)]);
        assert!(events.is_empty());
        assert!(c.confirmed().is_empty());
        // A detection far from the candidate does not count either.
        let events = c.handle_checked_target(&[det(40.0, 0.0, 0.99)]);
        assert!(events.is_empty());
    }

    #[test]
    fn step_passes_through_while_scanning() {
        let mut c = controller(Strategy::default());
        let v = scanning_vehicle(10.0, 0.0, &Strategy::default());
        let out = c.step(&v, &[], &SpeedProfile::default()).unwrap();
        assert_eq!(c.mode(), Mode::Scan);
        let cmd = out.command.unwrap();
        assert_eq!((cmd.x, cmd.y), (0.0, 0.0));
        assert_eq!(cmd.altitude, 25.0);
        assert_eq!(cmd.speed, 5.0);
        assert!(out.events.is_empty());
    }

    #[test]
    fn immediate_strategy_switches_on_first_detection() {
        let mut c = controller(Strategy::default()); // check_after_targets = 1
        let v = scanning_vehicle(10.0, 0.0, &Strategy::default());
        let out = c
            .step(&v, &[det(20.0, 3.0, 0.9)], &SpeedProfile::default())
            .unwrap();
        assert_eq!(c.mode(), Mode::Check);
        let cmd = out.command.unwrap();
        assert_eq!((cmd.x, cmd.y), (20.0, 3.0));
        assert_eq!(cmd.altitude, 5.0);
        assert_eq!(cmd.speed, 1.0);
        // The sweep resumes from the departure point: it was pushed onto the
        // remaining plan.
        assert_eq!(c.plan_remaining(), 3);
    }

    #[test]
    fn confirmed_pop_returns_to_scan() {
        let strategy = Strategy::default();
        let mut c = controller(strategy);
        let v = scanning_vehicle(10.0, 0.0, &strategy);
        c.step(&v, &[det(20.0, 0.0, 0.9)], &SpeedProfile::default())
            .unwrap();
        assert_eq!(c.mode(), Mode::Check);

        // Arrive at the candidate at check altitude with a confirming
        // detection.
        let at_candidate = VehicleState {
            altitude: 5.0,
            time: 30.0,
            ..VehicleState::on_ground(Point::new(20.0, 0.0))
        };
        let out = c
            .step(&at_candidate, &[det(20.0, 0.0, 0.95)], &SpeedProfile::default())
            .unwrap();
        assert_eq!(c.mode(), Mode::Scan);
        assert_eq!(c.confirmed().len(), 1);
        let cmd = out.command.unwrap();
        assert_eq!(cmd.altitude, 25.0, "resume commands the scan altitude");
        assert!(out
            .events
            .iter()
            .any(|e| matches!(e, ControlEvent::ModeSwitch { to: Mode::Scan })));
    }

    #[test]
    fn unconfirmed_candidate_discards_after_dwell() {
        let strategy = Strategy {
            dwell_time: 2.0,
            ..Strategy::default()
        };
        let mut c = controller(strategy);
        let v = scanning_vehicle(10.0, 0.0, &strategy);
        c.step(&v, &[det(20.0, 0.0, 0.9)], &SpeedProfile::default())
            .unwrap();

        let mut hover = VehicleState {
            altitude: 5.0,
            time: 30.0,
            ..VehicleState::on_ground(Point::new(20.0, 0.0))
        };
        // Dwell not yet expired: no change.
        let out = c.step(&hover, &[], &SpeedProfile::default()).unwrap();
        assert_eq!(c.pending_checks(), 1);
        assert!(out.events.is_empty());
        hover.time = 31.9;
        c.step(&hover, &[], &SpeedProfile::default()).unwrap();
        assert_eq!(c.pending_checks(), 1);
        // Dwell expires: the candidate is discarded, never confirmed.
        hover.time = 32.0;
        let out = c.step(&hover, &[], &SpeedProfile::default()).unwrap();
        assert!(out
            .events
            .iter()
            .any(|e| matches!(e, ControlEvent::TargetDiscarded { .. })));
        assert_eq!(c.pending_checks(), 0);
        assert!(c.confirmed().is_empty());
        assert_eq!(c.discarded().len(), 1);
        assert_eq!(c.mode(), Mode::Scan);
    }

    #[test]
    fn resolved_positions_are_suppressed_in_scan_mode() {
        let strategy = Strategy::default();
        let mut c = controller(strategy);
        let v = scanning_vehicle(10.0, 0.0, &strategy);
        c.step(&v, &[det(20.0, 0.0, 0.9)], &SpeedProfile::default())
            .unwrap();
        let at_candidate = VehicleState {
            altitude: 5.0,
            time: 30.0,
            ..VehicleState::on_ground(Point::new(20.0, 0.0))
        };
        c.step(&at_candidate, &[det(20.0, 0.0, 0.95)], &SpeedProfile::default())
            .unwrap();
        assert_eq!(c.mode(), Mode::Scan);
        // Re-detecting the confirmed target must not re-enter check mode.
        let climbing = VehicleState {
            altitude: 12.0,
            time: 31.0,
            ..VehicleState::on_ground(Point::new(20.0, 0.0))
        };
        c.step(&climbing, &[det(20.1, 0.0, 0.9)], &SpeedProfile::default())
            .unwrap();
        assert_eq!(c.mode(), Mode::Scan);
        assert!(c.scanned().is_empty());
    }

    #[test]
    fn mission_completes_and_rejects_further_steps() {
        let strategy = Strategy::default();
        let plan = [Point::new(0.0, 0.0)];
        let mut c = Controller::new(&plan, strategy, 0.5).unwrap();
        let at_end = VehicleState {
            altitude: 25.0,
            ..VehicleState::on_ground(Point::new(0.0, 0.0))
        };
        let out = c.step(&at_end, &[], &SpeedProfile::default()).unwrap();
        assert!(out.command.is_none());
        assert!(c.complete());
        assert!(matches!(
            c.step(&at_end, &[], &SpeedProfile::default()),
            Err(Error::MissionComplete)
        ));
    }

    #[test]
    fn limits_parse_numbers_and_inf_tokens() {
        #[derive(Deserialize)]
        struct Doc {
            n_c: CountLimit,
            d_c: DistanceLimit,
        }
        let doc: Doc = toml::from_str("n_c = 5\nd_c = 40.0").unwrap();
        assert_eq!(doc.n_c, CountLimit::Finite(5));
        assert_eq!(doc.d_c, DistanceLimit::Finite(40.0));

        let doc: Doc = toml::from_str("n_c = \"inf\"\nd_c = \"inf\"").unwrap();
        assert!(doc.n_c.is_infinite());
        assert!(doc.d_c.is_infinite());

        // TOML's native float infinity works for the distance limit.
        let doc: Doc = toml::from_str("n_c = 1\nd_c = inf").unwrap();
        assert!(doc.d_c.is_infinite());

        assert!("7".parse::<CountLimit>().is_ok());
        assert!("inf".parse::<CountLimit>().unwrap().is_infinite());
        assert!("x".parse::<CountLimit>().is_err());
    }

    #[test]
    fn strategy_serde_accepts_short_aliases_and_round_trips() {
        let toml_src = r#"
            scan_altitude = 30.0
            check_altitude = 6.0
            n_c = 5
            d_c = "inf"
            c_t = 0.75
        "#;
        let s: Strategy = toml::from_str(toml_src).unwrap();
        assert_eq!(s.scan_altitude, 30.0);
        assert_eq!(s.check_after_targets, CountLimit::Finite(5));
        assert!(s.check_after_distance.is_infinite());
        assert_eq!(s.confidence_threshold, 0.75);
        // Unset fields take defaults.
        assert_eq!(s.merge_radius, 3.0);

        let out = toml::to_string(&s).unwrap();
        let back: Strategy = toml::from_str(&out).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn strategy_validation() {
        assert!(Strategy::default().validate().is_ok());
        let bad = Strategy {
            check_altitude: 30.0,
            ..Strategy::default()
        };
        assert!(bad.validate().is_err());
        let bad = Strategy {
            confidence_threshold: 1.5,
            ..Strategy::default()
        };
        assert!(bad.validate().is_err());
        let bad = Strategy {
            check_after_distance: DistanceLimit::Finite(0.0),
            ..Strategy::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn labels_read_naturally() {
        assert_eq!(Strategy::default().label(), "nc=1");
        let s = Strategy {
            check_after_targets: CountLimit::Infinite,
            check_after_distance: DistanceLimit::Finite(40.0),
            ..Strategy::default()
        };
        assert_eq!(s.label(), "nc=inf,dc=40");
    }
}
