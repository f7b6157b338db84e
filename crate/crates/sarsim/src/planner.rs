//! Boustrophedon (lawnmower) coverage planning.
//!
//! The planner lays parallel lanes along the area's longer axis, spaced so
//! the camera swath covers the gaps, and emits the lane endpoints in
//! serpentine order. It deliberately knows nothing about cameras: callers
//! hand it the usable swath width on the ground.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

/// An ordered coverage path. Waypoints are lane endpoints only; the
/// controller attaches altitudes and handles straight-line tracking
/// between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightPlan {
    pub waypoints: Vec<Point>,
    pub lane_spacing: f64,
    /// Altitude the swath width was computed for, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_for_altitude: Option<f64>,
}

impl FlightPlan {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let plan: FlightPlan = toml::from_str(s).map_err(|e| Error::malformed("plan file", e))?;
        if plan.waypoints.is_empty() {
            return Err(Error::EmptyPlan);
        }
        Ok(plan)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Number of lanes (two waypoints per lane).
    pub fn lane_count(&self) -> usize {
        self.waypoints.len() / 2
    }
}

/// Plan a serpentine sweep of `area`.
///
/// `footprint_width` is the usable ground swath (m); lanes are spaced
/// `footprint_width * (1 - overlap_fraction)` apart and run parallel to the
/// longer side, starting at the corner nearest the origin. Every ground
/// point ends up within half a lane spacing of some lane centerline.
pub fn plan_lawnmower(area: Rect, footprint_width: f64, overlap_fraction: f64) -> Result<FlightPlan> {
    if !(footprint_width > 0.0) {
        return Err(Error::param("footprint_width", "must be positive"));
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::param("overlap_fraction", "must be in [0, 1)"));
    }
    let spacing = footprint_width * (1.0 - overlap_fraction);

    let along_x = area.width() >= area.height();
    let (long_lo, long_hi, short_lo, short_hi) = if along_x {
        (area.x_min, area.x_max, area.y_min, area.y_max)
    } else {
        (area.y_min, area.y_max, area.x_min, area.x_max)
    };
    let short_extent = short_hi - short_lo;

    let lanes = ((short_extent / spacing).ceil() as usize).max(1);
    // Center the lane stack: the residual margin on each side is at most
    // spacing/2, so edge points remain covered.
    let margin = (short_extent - (lanes - 1) as f64 * spacing) / 2.0;

    // Start at the corner nearest the origin.
    let corner = nearest_corner_to_origin(area);
    let (corner_long, corner_short) = if along_x {
        (corner.x, corner.y)
    } else {
        (corner.y, corner.x)
    };
    let lane_positions: Vec<f64> = (0..lanes)
        .map(|i| {
            let offset = margin + i as f64 * spacing;
            if corner_short == short_lo {
                short_lo + offset
            } else {
                short_hi - offset
            }
        })
        .collect();

    let mut waypoints = Vec::with_capacity(lanes * 2);
    for (i, &lane) in lane_positions.iter().enumerate() {
        let forward = i % 2 == 0;
        let (a, b) = if (corner_long == long_lo) == forward {
            (long_lo, long_hi)
        } else {
            (long_hi, long_lo)
        };
        for end in [a, b] {
            waypoints.push(if along_x {
                Point::new(end, lane)
            } else {
                Point::new(lane, end)
            });
        }
    }

    Ok(FlightPlan {
        waypoints,
        lane_spacing: spacing,
        generated_for_altitude: None,
    })
}

fn nearest_corner_to_origin(area: Rect) -> Point {
    let corners = [
        Point::new(area.x_min, area.y_min),
        Point::new(area.x_min, area.y_max),
        Point::new(area.x_max, area.y_min),
        Point::new(area.x_max, area.y_max),
    ];
    let origin = Point::new(0.0, 0.0);
    corners
        .into_iter()
        .min_by(|a, b| {
            a.distance(origin)
                .partial_cmp(&b.distance(origin))
                .unwrap()
        })
        .unwrap()
}

/// Total Euclidean length of the plan's polyline. Zero for a single
/// waypoint; an empty plan is rejected.
pub fn path_length(plan: &FlightPlan) -> Result<f64> {
    if plan.waypoints.is_empty() {
        return Err(Error::EmptyPlan);
    }
    Ok(plan
        .waypoints
        .windows(2)
        .map(|w| w[0].distance(w[1]))
        .sum())
}
