//! Kinematic UAV model: waypoint tracking at commanded speed and altitude,
//! vertical-first climb/descent, yaw slew with a turning flag, and the
//! altitude-dependent camera ground footprint.
//!
//! Motion is deliberately simple — constant commanded speeds, no inertia —
//! because the strategies under study compare through time spent, not
//! through flight dynamics. The one rotational effect that matters is kept:
//! the heading slews at a finite yaw rate while the vehicle translates, and
//! steps with a large heading change raise `turning`, which the perception
//! model uses to inflate false-alarm rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_diff, normalize_angle, Point, Rect};

/// Heading change (rad) within one step above which the step counts as
/// turning.
pub const TURN_THRESHOLD: f64 = 0.1;

const EPS: f64 = 1e-9;

/// Instantaneous UAV state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub position: Point,
    pub altitude: f64,
    pub horizontal_speed: f64,
    pub vertical_speed: f64,
    /// Yaw, normalized to [0, 2π).
    pub heading: f64,
    pub turning: bool,
    pub time: f64,
}

impl VehicleState {
    /// At rest on the ground at `position`.
    pub fn on_ground(position: Point) -> Self {
        VehicleState {
            position,
            altitude: 0.0,
            horizontal_speed: 0.0,
            vertical_speed: 0.0,
            heading: 0.0,
            turning: false,
            time: 0.0,
        }
    }
}

/// A 3-D tracking goal: a ground point plus an altitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightTarget {
    pub position: Point,
    pub altitude: f64,
}

impl FlightTarget {
    pub fn new(x: f64, y: f64, altitude: f64) -> Self {
        FlightTarget {
            position: Point::new(x, y),
            altitude,
        }
    }
}

/// Nadir camera field of view, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub horizontal_fov: f64,
    pub vertical_fov: f64,
}

impl CameraModel {
    pub fn new(horizontal_fov: f64, vertical_fov: f64) -> Result<Self> {
        for (name, v) in [("horizontal_fov", horizontal_fov), ("vertical_fov", vertical_fov)] {
            if !(v > 0.0 && v < std::f64::consts::PI) {
                return Err(Error::param(name, "must be in (0, pi) radians"));
            }
        }
        Ok(CameraModel {
            horizontal_fov,
            vertical_fov,
        })
    }

    pub fn from_degrees(h_deg: f64, v_deg: f64) -> Result<Self> {
        CameraModel::new(h_deg.to_radians(), v_deg.to_radians())
    }

    /// Ground footprint width and height (m) at the given altitude.
    pub fn footprint_dimensions(&self, altitude: f64) -> (f64, f64) {
        (
            2.0 * altitude * (self.horizontal_fov / 2.0).tan(),
            2.0 * altitude * (self.vertical_fov / 2.0).tan(),
        )
    }

    /// The narrower footprint dimension — a safe swath width for lane
    /// spacing regardless of flight direction.
    pub fn swath_width(&self, altitude: f64) -> f64 {
        let (w, h) = self.footprint_dimensions(altitude);
        w.min(h)
    }
}

impl Default for CameraModel {
    fn default() -> Self {
        CameraModel::from_degrees(80.0, 60.0).unwrap()
    }
}

/// Commanded speeds and rates. The scan/check split mirrors the two flight
/// modes; the default ratio is 5:1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpeedProfile {
    pub scan_speed: f64,
    pub check_speed: f64,
    pub climb_rate: f64,
    pub descent_rate: f64,
    /// Max heading slew rate (rad/s). Yaw is concurrent with translation.
    pub yaw_rate: f64,
}

impl Default for SpeedProfile {
    fn default() -> Self {
        SpeedProfile {
            scan_speed: 5.0,
            check_speed: 1.0,
            climb_rate: 2.0,
            descent_rate: 2.0,
            yaw_rate: 1.5,
        }
    }
}

impl SpeedProfile {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("scan_speed", self.scan_speed),
            ("check_speed", self.check_speed),
            ("climb_rate", self.climb_rate),
            ("descent_rate", self.descent_rate),
            ("yaw_rate", self.yaw_rate),
        ] {
            if !(v > 0.0) {
                return Err(Error::param(name, "must be positive"));
            }
        }
        Ok(())
    }
}

/// Move toward `target` for up to `budget` seconds: altitude first at the
/// climb/descent rate, then straight-line horizontal motion at
/// `horizontal_speed_cmd`, clamping exactly onto the target without
/// overshoot. Heading slews toward the direction of travel at the yaw rate,
/// concurrently with motion.
///
/// Returns the new state and the time actually consumed, which is less than
/// `budget` when the vehicle reaches the target early. `time` advances by
/// the consumed amount.
pub fn advance(
    state: &VehicleState,
    target: &FlightTarget,
    speeds: &SpeedProfile,
    horizontal_speed_cmd: f64,
    budget: f64,
) -> (VehicleState, f64) {
    let mut next = *state;
    next.horizontal_speed = 0.0;
    next.vertical_speed = 0.0;
    let mut used = 0.0;

    // Bearing of travel, fixed at the start of the move.
    let bearing = state.position.bearing_to(target.position);

    // Vertical phase.
    let dz = target.altitude - next.altitude;
    if dz.abs() > EPS && budget > EPS {
        let rate = if dz > 0.0 {
            speeds.climb_rate
        } else {
            speeds.descent_rate
        };
        let t_need = dz.abs() / rate;
        if t_need <= budget {
            next.altitude = target.altitude;
            used += t_need;
        } else {
            next.altitude += rate * budget * dz.signum();
            used = budget;
        }
        next.vertical_speed = rate;
    }

    // Horizontal phase with whatever budget remains.
    let remaining = budget - used;
    let to_go = next.position.distance(target.position);
    if to_go > EPS && remaining > EPS {
        let t_need = to_go / horizontal_speed_cmd;
        if t_need <= remaining {
            next.position = target.position;
            used += t_need;
        } else {
            let frac = horizontal_speed_cmd * remaining / to_go;
            next.position.x += (target.position.x - next.position.x) * frac;
            next.position.y += (target.position.y - next.position.y) * frac;
            used = budget;
        }
        next.horizontal_speed = horizontal_speed_cmd;
    }

    // Yaw slew over the wall-clock time of this call.
    if let Some(desired) = bearing {
        let diff = angle_diff(next.heading, desired);
        let max_step = speeds.yaw_rate * used;
        let applied = diff.clamp(-max_step, max_step);
        next.heading = normalize_angle(next.heading + applied);
        next.turning = applied.abs() > TURN_THRESHOLD;
    } else {
        next.turning = false;
    }

    next.time += used;
    (next, used)
}

/// One fixed step of `dt` seconds toward `target`. Time always advances by
/// `dt`, even when the vehicle arrives (and then holds) early.
pub fn step_toward(
    state: &VehicleState,
    target: &FlightTarget,
    speeds: &SpeedProfile,
    horizontal_speed_cmd: f64,
    dt: f64,
) -> VehicleState {
    debug_assert!(dt > 0.0);
    debug_assert!(horizontal_speed_cmd > 0.0);
    let (mut next, _) = advance(state, target, speeds, horizontal_speed_cmd, dt);
    next.time = state.time + dt;
    next
}

/// True iff the 3-D distance to `target` is within `tolerance` (inclusive).
pub fn at_waypoint(state: &VehicleState, target: &FlightTarget, tolerance: f64) -> bool {
    debug_assert!(tolerance > 0.0);
    let dxy = state.position.distance(target.position);
    let dz = state.altitude - target.altitude;
    dxy.hypot(dz) <= tolerance
}

/// Ground rectangle visible to the nadir camera: axis-aligned, centered
/// under the vehicle, growing linearly with altitude.
pub fn footprint_at(state: &VehicleState, camera: &CameraModel) -> Result<Rect> {
    if !(state.altitude > 0.0) {
        return Err(Error::param("altitude", "footprint requires altitude > 0"));
    }
    let (w, h) = camera.footprint_dimensions(state.altitude);
    Rect::centered(state.position, w, h)
}
