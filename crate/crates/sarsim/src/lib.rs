//! Deterministic, seedable simulator for evaluating UAV search-and-rescue
//! flight strategies.
//!
//! The simulated vehicle scans an area at high altitude along a lawnmower
//! coverage plan and descends to a low "check" altitude to confirm candidate
//! targets, trading area-coverage speed against detection quality. The
//! controller batches candidates before descending (`check_after_targets`,
//! `check_after_distance`), so the same world can be searched with an
//! inspect-immediately strategy, a cluster-batching strategy, or a
//! scan-everything-then-check strategy, and the resulting mission times and
//! false-positive costs compared.
//!
//! Everything is a pure function of the run configuration and a `u64` seed:
//! reruns are bit-identical, which makes parameter sweeps and regression
//! tests cheap.
//!
//! The crate is organized along the simulation loop:
//!
//! - [`world`]: ground truth — mission area, targets, scenario generation.
//! - [`planner`]: boustrophedon coverage plans over the area.
//! - [`vehicle`]: waypoint-tracking kinematics and the camera footprint.
//! - [`perception`]: a parametric detector model with altitude-dependent
//!   quality and turn-induced false alarms.
//! - [`mission`]: the scan/check mode controller and its candidate lists.
//! - [`engine`]: the fixed-timestep closed loop, traces, and metrics.
//! - [`experiment`]: batch sweeps over strategies and seeds.
//! - [`plot`]: SVG rendering of flight traces.

pub mod engine;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod mission;
pub mod perception;
pub mod planner;
pub mod plot;
pub mod vehicle;
pub mod world;

pub use engine::{run_batch, run_mission, MissionResult, RunConfig, Trace};
pub use error::{Error, Result};
pub use experiment::{run_sweep, ExperimentSpec, SweepResults};
pub use geometry::{Point, Rect};
pub use mission::{Controller, CountLimit, DistanceLimit, Mode, Strategy};
pub use perception::{Detection, DetectorModel};
pub use planner::FlightPlan;
pub use vehicle::{CameraModel, SpeedProfile, VehicleState};
pub use world::{Scenario, ScenarioKind, Target};
