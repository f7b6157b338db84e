//! Parametric detector model.
//!
//! Stands in for a real onboard object detector: per-frame Bernoulli
//! detections of targets inside the camera footprint, with detection
//! probability, confidence, and position noise all interpolated linearly in
//! altitude between a low and a high reference altitude. Spurious
//! detections arrive as a Poisson process whose rate is multiplied while
//! the vehicle is turning, reproducing the camera-instability false alarms
//! that direction changes cause.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::vehicle::{footprint_at, CameraModel, VehicleState};
use crate::world::{targets_in_region, Scenario};

/// Detector quality as a function of altitude, plus false-alarm behavior.
///
/// Between `h_ref_low` and `h_ref_high` every altitude-dependent quantity
/// interpolates linearly; outside it clamps to the endpoint values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorModel {
    /// Detection probability at or below the low reference altitude.
    pub p_max: f64,
    /// Detection probability at or above the high reference altitude.
    pub p_min: f64,
    pub h_ref_low: f64,
    pub h_ref_high: f64,
    /// Mean reported confidence at the low reference altitude.
    pub confidence_mean_low: f64,
    /// Mean reported confidence at the high reference altitude.
    pub confidence_mean_high: f64,
    /// Confidence is drawn uniformly from mean ± spread, clamped to [0, 1].
    pub confidence_spread: f64,
    /// Std-dev of position noise per meter of altitude (m/m).
    pub position_noise_per_meter_altitude: f64,
    /// Spurious detections per second in steady flight.
    pub fp_rate_cruise: f64,
    /// Spurious rate multiplier while the vehicle is turning.
    pub fp_turn_multiplier: f64,
    /// Mean confidence of spurious detections (same spread as above).
    pub fp_confidence_mean: f64,
    /// Detector frames per second folded into each simulation step.
    pub frame_rate: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        DetectorModel {
            p_max: 0.98,
            p_min: 0.55,
            h_ref_low: 5.0,
            h_ref_high: 40.0,
            confidence_mean_low: 0.9,
            confidence_mean_high: 0.5,
            confidence_spread: 0.1,
            position_noise_per_meter_altitude: 0.08,
            fp_rate_cruise: 0.005,
            fp_turn_multiplier: 20.0,
            fp_confidence_mean: 0.3,
            frame_rate: 10.0,
        }
    }
}

impl DetectorModel {
    /// A noiseless detector: certain detection at any altitude, exact
    /// positions, full confidence, no false alarms.
    pub fn perfect() -> Self {
        DetectorModel {
            p_max: 1.0,
            p_min: 1.0,
            confidence_mean_low: 1.0,
            confidence_mean_high: 1.0,
            confidence_spread: 0.0,
            position_noise_per_meter_altitude: 0.0,
            fp_rate_cruise: 0.0,
            fp_turn_multiplier: 1.0,
            ..DetectorModel::default()
        }
    }

    pub fn validate(&self) -> crate::error::Result<()> {
        use crate::error::Error;
        if !(0.0 <= self.p_min && self.p_min <= self.p_max && self.p_max <= 1.0) {
            return Err(Error::param("p_min/p_max", "need 0 <= p_min <= p_max <= 1"));
        }
        if !(self.h_ref_low < self.h_ref_high) {
            return Err(Error::param("h_ref_low", "must be below h_ref_high"));
        }
        if !(self.fp_turn_multiplier >= 1.0) {
            return Err(Error::param("fp_turn_multiplier", "must be at least 1"));
        }
        if !(self.fp_rate_cruise >= 0.0) {
            return Err(Error::param("fp_rate_cruise", "must be non-negative"));
        }
        if !(self.frame_rate > 0.0) {
            return Err(Error::param("frame_rate", "must be positive"));
        }
        Ok(())
    }
}

/// One perception event. `source_target_id` links back to ground truth for
/// metrics only — the controller never sees it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub estimated_position: Point,
    pub confidence: f64,
    /// Std-dev of the position estimate (noise coefficient times the
    /// altitude it was taken from). The controller uses it to gate
    /// re-detections of already-resolved positions.
    pub position_sigma: f64,
    pub timestamp: f64,
    /// `None` exactly for spurious detections.
    pub source_target_id: Option<u32>,
}

fn lerp_by_altitude(altitude: f64, h_lo: f64, h_hi: f64, v_lo: f64, v_hi: f64) -> f64 {
    if altitude <= h_lo {
        v_lo
    } else if altitude >= h_hi {
        v_hi
    } else {
        let t = (altitude - h_lo) / (h_hi - h_lo);
        v_lo + t * (v_hi - v_lo)
    }
}

/// Detection probability at the given altitude: `p_max` at or below
/// `h_ref_low`, `p_min` at or above `h_ref_high`, linear in between.
pub fn detection_probability(model: &DetectorModel, altitude: f64) -> f64 {
    lerp_by_altitude(
        altitude,
        model.h_ref_low,
        model.h_ref_high,
        model.p_max,
        model.p_min,
    )
}

/// Draw a confidence for a target detection at this altitude: uniform
/// around the altitude-interpolated mean, clamped to [0, 1].
pub fn confidence_sample(model: &DetectorModel, altitude: f64, rng: &mut ChaCha8Rng) -> f64 {
    let mean = lerp_by_altitude(
        altitude,
        model.h_ref_low,
        model.h_ref_high,
        model.confidence_mean_low,
        model.confidence_mean_high,
    );
    sample_around(mean, model.confidence_spread, rng)
}

fn sample_around(mean: f64, spread: f64, rng: &mut ChaCha8Rng) -> f64 {
    let v = if spread > 0.0 {
        mean + rng.gen_range(-spread..=spread)
    } else {
        mean
    };
    v.clamp(0.0, 1.0)
}

/// Run the detector for one step of `dt` seconds.
///
/// Every true target inside the camera footprint is detected with
/// probability `1 - (1 - p(altitude))^(dt * frame_rate)`; hits get isotropic
/// Gaussian position noise with sigma proportional to altitude and a
/// confidence drawn from the altitude-interpolated distribution. Spurious
/// detections are added as a Poisson process at the cruise rate, multiplied
/// while turning, with positions uniform in the footprint and low-mean
/// confidences. Deterministic given the rng state. Returns nothing when the
/// vehicle is on the ground.
pub fn sense(
    model: &DetectorModel,
    state: &VehicleState,
    scenario: &Scenario,
    camera: &CameraModel,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Detection> {
    debug_assert!(dt > 0.0);
    if !(state.altitude > 0.0) {
        return Vec::new();
    }
    let footprint = match footprint_at(state, camera) {
        Ok(fp) => fp,
        Err(_) => return Vec::new(),
    };

    let mut detections = Vec::new();
    let p_frame = detection_probability(model, state.altitude);
    let p_step = 1.0 - (1.0 - p_frame).powf(dt * model.frame_rate);
    let sigma = model.position_noise_per_meter_altitude * state.altitude;

    for target in targets_in_region(scenario, &footprint) {
        if !rng.gen_bool(p_step.clamp(0.0, 1.0)) {
            continue;
        }
        let mut pos = target.position();
        if sigma > 0.0 {
            let noise = Normal::new(0.0, sigma).expect("finite sigma");
            pos.x += noise.sample(rng);
            pos.y += noise.sample(rng);
        }
        detections.push(Detection {
            estimated_position: pos,
            confidence: confidence_sample(model, state.altitude, rng),
            position_sigma: sigma,
            timestamp: state.time,
            source_target_id: Some(target.id),
        });
    }

    let rate = model.fp_rate_cruise
        * if state.turning {
            model.fp_turn_multiplier
        } else {
            1.0
        };
    let lambda = rate * dt;
    if lambda > 0.0 {
        let count = Poisson::new(lambda).expect("positive lambda").sample(rng) as u64;
        for _ in 0..count {
            let pos = Point::new(
                rng.gen_range(footprint.x_min..=footprint.x_max),
                rng.gen_range(footprint.y_min..=footprint.y_max),
            );
            detections.push(Detection {
                estimated_position: pos,
                confidence: sample_around(model.fp_confidence_mean, model.confidence_spread, rng),
                position_sigma: sigma,
                timestamp: state.time,
                source_target_id: None,
            });
        }
    }

    detections
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::world::Scenario;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn hovering(x: f64, y: f64, altitude: f64) -> VehicleState {
        VehicleState {
            altitude,
            ..VehicleState::on_ground(Point::new(x, y))
        }
    }

    fn one_target_scenario() -> Scenario {
        let area = Rect::new(0.0, 0.0, 100.0, 100.0).unwrap();
        Scenario::custom(area, &[Point::new(50.0, 50.0)], 0).unwrap()
    }

    #[test]
    fn probability_endpoints_and_midpoint() {
        let m = DetectorModel::default();
        assert_eq!(detection_probability(&m, m.h_ref_low), m.p_max);
        assert_eq!(detection_probability(&m, 1.0), m.p_max);
        assert_eq!(detection_probability(&m, m.h_ref_high), m.p_min);
        assert_eq!(detection_probability(&m, 80.0), m.p_min);
        let mid = (m.h_ref_low + m.h_ref_high) / 2.0;
        assert!((detection_probability(&m, mid) - (m.p_max + m.p_min) / 2.0).abs() < 1e-12);
        // Non-increasing in altitude.
        let mut prev = 1.0;
        for alt in [1.0, 5.0, 10.0, 20.0, 30.0, 40.0, 60.0] {
            let p = detection_probability(&m, alt);
            assert!(p <= prev + 1e-12);
            prev = p;
        }
    }

    #[test]
    fn confidence_sample_with_zero_spread_hits_the_mean() {
        let m = DetectorModel {
            confidence_spread: 0.0,
            ..DetectorModel::default()
        };
        let mut r = rng(1);
        assert_eq!(confidence_sample(&m, m.h_ref_low, &mut r), m.confidence_mean_low);
        assert_eq!(confidence_sample(&m, m.h_ref_high, &mut r), m.confidence_mean_high);
    }

    #[test]
    fn confidence_sample_mean_converges_to_interpolated_mean() {
        let m = DetectorModel::default();
        let mid = (m.h_ref_low + m.h_ref_high) / 2.0;
        let expected = (m.confidence_mean_low + m.confidence_mean_high) / 2.0;
        let mut r = rng(2);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| confidence_sample(&m, mid, &mut r)).sum::<f64>() / n as f64;
        assert!((mean - expected).abs() < 0.01, "mean {mean} vs {expected}");
    }

    #[test]
    fn empty_when_no_targets_and_zero_fp_rate() {
        let m = DetectorModel {
            fp_rate_cruise: 0.0,
            ..DetectorModel::default()
        };
        let area = Rect::new(0.0, 0.0, 100.0, 100.0).unwrap();
        let scenario = Scenario::custom(area, &[], 0).unwrap();
        let out = sense(&m, &hovering(10.0, 10.0, 20.0), &scenario, &CameraModel::default(), 0.1, &mut rng(3));
        assert!(out.is_empty());
    }

    #[test]
    fn perfect_detector_reports_the_exact_target() {
        let m = DetectorModel::perfect();
        let scenario = one_target_scenario();
        let state = hovering(50.0, 50.0, 20.0);
        let out = sense(&m, &state, &scenario, &CameraModel::default(), 0.1, &mut rng(4));
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].estimated_position, Point::new(50.0, 50.0));
        assert_eq!(out[0].source_target_id, Some(0));
        assert_eq!(out[0].confidence, 1.0);
    }

    #[test]
    fn perfect_detector_sees_exactly_the_footprint_contents() {
        // With p = 1, no noise, and no false alarms, sense() equals the
        // ground-truth region query every step.
        let m = DetectorModel::perfect();
        let area = Rect::new(0.0, 0.0, 100.0, 100.0).unwrap();
        let positions: Vec<Point> = (0..10)
            .map(|i| Point::new(10.0 * i as f64 + 5.0, 48.0 + (i % 3) as f64 * 2.0))
            .collect();
        let scenario = Scenario::custom(area, &positions, 0).unwrap();
        let camera = CameraModel::default();
        let mut r = rng(5);
        for x in [5.0, 25.0, 50.0, 75.0, 95.0] {
            let state = hovering(x, 50.0, 25.0);
            let fp = footprint_at(&state, &camera).unwrap();
            let expected: Vec<u32> = targets_in_region(&scenario, &fp).iter().map(|t| t.id).collect();
            let got: Vec<u32> = sense(&m, &state, &scenario, &camera, 0.1, &mut r)
                .iter()
                .map(|d| d.source_target_id.unwrap())
                .collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn spurious_counts_follow_the_poisson_law() {
        // 10,000 turning steps of 0.1 s at 0.02/s cruise rate with a 10x
        // turn multiplier: expect Poisson(200) within 3 sigma.
        let m = DetectorModel {
            fp_rate_cruise: 0.02,
            fp_turn_multiplier: 10.0,
            ..DetectorModel::default()
        };
        let area = Rect::new(0.0, 0.0, 100.0, 100.0).unwrap();
        let scenario = Scenario::custom(area, &[], 0).unwrap();
        let state = VehicleState {
            turning: true,
            ..hovering(50.0, 50.0, 20.0)
        };
        let mut r = rng(6);
        let mut count = 0usize;
        for _ in 0..10_000 {
            count += sense(&m, &state, &scenario, &CameraModel::default(), 0.1, &mut r).len();
        }
        let lambda = 200.0f64;
        let sigma = lambda.sqrt();
        assert!(
            (count as f64 - lambda).abs() <= 3.0 * sigma,
            "spurious count {count} outside 3 sigma of Poisson({lambda})"
        );
    }

    #[test]
    fn turning_produces_more_spurious_detections_than_cruise() {
        let m = DetectorModel::default();
        let area = Rect::new(0.0, 0.0, 100.0, 100.0).unwrap();
        let scenario = Scenario::custom(area, &[], 0).unwrap();
        let camera = CameraModel::default();
        let mut turning_total = 0usize;
        let mut straight_total = 0usize;
        for seed in 0..50 {
            let mut r1 = rng(seed);
            let mut r2 = rng(seed);
            let turning = VehicleState { turning: true, ..hovering(50.0, 50.0, 25.0) };
            let straight = VehicleState { turning: false, ..hovering(50.0, 50.0, 25.0) };
            for _ in 0..2_000 {
                turning_total += sense(&m, &turning, &scenario, &camera, 0.1, &mut r1).len();
                straight_total += sense(&m, &straight, &scenario, &camera, 0.1, &mut r2).len();
            }
        }
        assert!(
            turning_total > straight_total,
            "turning {turning_total} <= straight {straight_total}"
        );
    }

    #[test]
    fn identical_seeds_give_identical_detection_sequences() {
        let m = DetectorModel::default();
        let scenario = one_target_scenario();
        let camera = CameraModel::default();
        let run = |seed: u64| {
            let mut r = rng(seed);
            let mut all = Vec::new();
            for i in 0..200 {
                let state = hovering(40.0 + i as f64 * 0.1, 50.0, 18.0);
                all.extend(sense(&m, &state, &scenario, &camera, 0.1, &mut r));
            }
            all
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42).len(), 0);
    }

    #[test]
    fn position_error_grows_linearly_with_altitude() {
        // Regress the per-axis sample standard deviation against altitude;
        // the slope recovers the configured noise coefficient.
        let m = DetectorModel {
            fp_rate_cruise: 0.0,
            p_max: 1.0,
            p_min: 1.0,
            ..DetectorModel::default()
        };
        let scenario = one_target_scenario();
        let camera = CameraModel::default();
        let mut r = rng(7);
        let altitudes = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &alt in &altitudes {
            let state = hovering(50.0, 50.0, alt);
            let mut errs = Vec::with_capacity(4000);
            for _ in 0..4_000 {
                let out = sense(&m, &state, &scenario, &camera, 0.1, &mut r);
                errs.push(out[0].estimated_position.x - 50.0);
            }
            let n = errs.len() as f64;
            let mean = errs.iter().sum::<f64>() / n;
            let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
            xs.push(alt);
            ys.push(var.sqrt());
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        let expected = m.position_noise_per_meter_altitude;
        assert!(
            (slope - expected).abs() < 0.01,
            "noise slope {slope} vs configured {expected}"
        );
    }

    #[test]
    fn model_validation_catches_bad_configs() {
        let mut m = DetectorModel::default();
        assert!(m.validate().is_ok());
        m.p_min = 1.5;
        assert!(m.validate().is_err());
        let m = DetectorModel {
            h_ref_low: 50.0,
            h_ref_high: 40.0,
            ..DetectorModel::default()
        };
        assert!(m.validate().is_err());
        let m = DetectorModel {
            fp_turn_multiplier: 0.5,
            ..DetectorModel::default()
        };
        assert!(m.validate().is_err());
    }
}
