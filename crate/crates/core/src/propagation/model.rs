use serde::{Deserialize, Serialize};

use crate::geometry::{wall_crossings, FloorPlan, Point2D, Segment};

use super::PropagationError;

/// Log-distance parameters for the multi-wall model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioConfig {
    pub frequency_mhz: f64,
    /// Pathloss at `reference_distance`, dB.
    pub reference_pathloss: f64,
    pub reference_distance: f64,
    pub pathloss_exponent: f64,
}

impl Default for RadioConfig {
    /// 2.4 GHz, 40.05 dB at 1 m, free-space exponent.
    fn default() -> Self {
        Self {
            frequency_mhz: 2400.0,
            reference_pathloss: 40.05,
            reference_distance: 1.0,
            pathloss_exponent: 2.0,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<(), PropagationError> {
        let bad = |msg: String| Err(PropagationError::InvalidConfig(msg));
        if !(self.frequency_mhz > 0.0) {
            return bad(format!("frequency must be > 0 (got {})", self.frequency_mhz));
        }
        if !(self.reference_distance > 0.0) {
            return bad(format!(
                "reference distance must be > 0 (got {})",
                self.reference_distance
            ));
        }
        if !(self.pathloss_exponent >= 1.0) {
            return bad(format!(
                "pathloss exponent must be >= 1 (got {})",
                self.pathloss_exponent
            ));
        }
        if !self.reference_pathloss.is_finite() {
            return bad("reference pathloss must be finite".into());
        }
        Ok(())
    }

    /// Distance term only: PL0 + 10 n log10(max(d, d0) / d0).
    pub fn distance_loss(&self, distance: f64) -> f64 {
        let d = distance.max(self.reference_distance);
        self.reference_pathloss
            + 10.0 * self.pathloss_exponent * (d / self.reference_distance).log10()
    }
}

/// Multi-wall pathloss between two points, dB.
///
/// Scans every wall of the plan; see [`super::Evaluator`] for the indexed path.
pub fn pathloss(tx: Point2D, rx: Point2D, plan: &FloorPlan, config: &RadioConfig) -> f64 {
    let walls: f64 = wall_crossings(&Segment::new(tx, rx), plan)
        .iter()
        .map(|c| c.attenuation)
        .sum();
    config.distance_loss(tx.distance(&rx)) + walls
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    fn empty() -> FloorPlan {
        let mut plan = FloorPlan::new(Rect::new(Point2D::new(0.0, 0.0), 20.0, 10.0));
        plan.add_material("concrete", 10.0);
        plan
    }

    #[test]
    fn reference_distance_gives_reference_pathloss() {
        let cfg = RadioConfig::default();
        let pl = pathloss(Point2D::new(1.0, 1.0), Point2D::new(2.0, 1.0), &empty(), &cfg);
        assert_eq!(pl, cfg.reference_pathloss);
    }

    #[test]
    fn ten_meters_free_space() {
        // 40.05 + 20 * log10(10) = 60.05
        let cfg = RadioConfig::default();
        let pl = pathloss(Point2D::new(1.0, 5.0), Point2D::new(11.0, 5.0), &empty(), &cfg);
        assert!((pl - 60.05).abs() < 1e-12);
    }

    #[test]
    fn one_wall_adds_its_attenuation() {
        let cfg = RadioConfig::default();
        let mut plan = empty();
        plan.add_wall(Point2D::new(6.0, 0.0), Point2D::new(6.0, 10.0), "concrete", 0.2);
        let pl = pathloss(Point2D::new(1.0, 5.0), Point2D::new(11.0, 5.0), &plan, &cfg);
        assert!((pl - 70.05).abs() < 1e-12);
    }

    #[test]
    fn distance_is_clamped_below_reference() {
        let cfg = RadioConfig::default();
        let p = Point2D::new(3.0, 3.0);
        assert_eq!(pathloss(p, p, &empty(), &cfg), cfg.reference_pathloss);
    }

    #[test]
    fn config_rejects_bad_values() {
        let cfg = RadioConfig {
            pathloss_exponent: 0.5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = RadioConfig {
            reference_distance: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
