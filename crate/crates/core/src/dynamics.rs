//! Kinematic single-track vehicle model.
//!
//! The state is referenced to the center of gravity (CG). For a steering angle
//! `delta` the side-slip angle is `beta = atan(l_r / L * tan(delta))` and one
//! explicit Euler step of length `dt` is
//!
//! ```text
//! x   += v * cos(psi + beta) * dt
//! y   += v * sin(psi + beta) * dt
//! psi += v * cos(beta) * tan(delta) / L * dt
//! ```
//!
//! Speed is a direct control input: the commanded speed takes effect at once.

use serde::{Deserialize, Serialize};

use crate::geom::{wrap_angle, Pose, Vec2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("action field `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("invalid vehicle parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    /// Body length (m).
    pub length: f64,
    /// Body width (m).
    pub width: f64,
    pub wheelbase: f64,
    /// Distance from the rear axle to the CG.
    pub rear_to_cg: f64,
    pub min_speed: f64,
    pub max_speed: f64,
    /// Symmetric steering limit (rad).
    pub max_steering: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            length: 0.16,
            width: 0.08,
            wheelbase: 0.16,
            rear_to_cg: 0.08,
            min_speed: -0.8,
            max_speed: 0.8,
            max_steering: 35f64.to_radians(),
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |m: String| Err(DynamicsError::InvalidParams(m));
        if !(self.length > 0.0 && self.width > 0.0) {
            return bad(format!(
                "body dimensions must be positive, got {} x {}",
                self.length, self.width
            ));
        }
        if !(0.0 < self.rear_to_cg
            && self.rear_to_cg < self.wheelbase
            && self.wheelbase <= self.length)
        {
            return bad(format!(
                "need 0 < rear_to_cg < wheelbase <= length, got {} / {} / {}",
                self.rear_to_cg, self.wheelbase, self.length
            ));
        }
        if self.min_speed > self.max_speed
            || !self.min_speed.is_finite()
            || !self.max_speed.is_finite()
        {
            return bad(format!(
                "speed limits [{}, {}] are not ordered",
                self.min_speed, self.max_speed
            ));
        }
        if !(self.max_steering > 0.0 && self.max_steering < std::f64::consts::FRAC_PI_2) {
            return bad(format!(
                "steering limit {} rad out of (0, pi/2)",
                self.max_steering
            ));
        }
        Ok(())
    }

    /// Body diagonal `sqrt(length^2 + width^2)`.
    pub fn diagonal(&self) -> f64 {
        self.length.hypot(self.width)
    }

    /// Side-slip angle at the CG for steering angle `steering`.
    pub fn slip_angle(&self, steering: f64) -> f64 {
        (self.rear_to_cg / self.wheelbase * steering.tan()).atan()
    }
}

/// Speed (m/s) and steering angle (rad, positive turns left).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Action {
    pub speed: f64,
    pub steering: f64,
}

impl Action {
    pub const fn new(speed: f64, steering: f64) -> Self {
        Self { speed, steering }
    }
}

/// Progress of an agent along its assigned reference path.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PathTrack {
    /// Index into the map's reference paths.
    pub path: usize,
    /// Arc length along the path (m).
    pub s: f64,
    /// Stitched segment the CG projects onto.
    pub segment: usize,
    /// Signed offset from the center line, positive to the left (m).
    pub lateral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AgentState {
    pub pose: Pose,
    pub speed: f64,
    /// Steering angle applied during the last step; sets the velocity direction.
    pub steering: f64,
    pub track: PathTrack,
}

impl AgentState {
    pub fn position(&self) -> Vec2 {
        self.pose.position()
    }

    /// World-frame velocity of the CG, `v * (cos(psi + beta), sin(psi + beta))`.
    pub fn velocity(&self, params: &VehicleParams) -> Vec2 {
        Vec2::from_angle(self.pose.yaw + params.slip_angle(self.steering)) * self.speed
    }
}

/// Clips an action to the vehicle's speed and steering limits.
pub fn clamp_action(a: Action, p: &VehicleParams) -> Result<Action, DynamicsError> {
    if !a.speed.is_finite() {
        return Err(DynamicsError::NonFinite("speed"));
    }
    if !a.steering.is_finite() {
        return Err(DynamicsError::NonFinite("steering"));
    }
    Ok(Action {
        speed: a.speed.clamp(p.min_speed, p.max_speed),
        steering: a.steering.clamp(-p.max_steering, p.max_steering),
    })
}

/// One explicit Euler step. The path track is carried over untouched; the
/// environment reprojects it onto the reference path afterwards.
pub fn step_kinematics(state: &AgentState, a: Action, dt: f64, p: &VehicleParams) -> AgentState {
    let beta = p.slip_angle(a.steering);
    let v = a.speed;
    let Pose { x, y, yaw } = state.pose;
    let course = yaw + beta;
    let yaw_rate = v * beta.cos() * a.steering.tan() / p.wheelbase;
    AgentState {
        pose: Pose::new(
            x + v * course.cos() * dt,
            y + v * course.sin() * dt,
            wrap_angle(yaw + yaw_rate * dt),
        ),
        speed: v,
        steering: a.steering,
        track: state.track,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn origin() -> AgentState {
        AgentState::default()
    }

    #[test]
    fn clamp_examples() {
        let p = VehicleParams::default();
        assert_eq!(
            clamp_action(Action::new(1.0, 0.0), &p).unwrap(),
            Action::new(0.8, 0.0)
        );
        let a = clamp_action(Action::new(0.5, 40f64.to_radians()), &p).unwrap();
        assert_eq!(a.speed, 0.5);
        assert!((a.steering - 35f64.to_radians()).abs() < 1e-15);
        let inside = Action::new(0.3, -10f64.to_radians());
        assert_eq!(clamp_action(inside, &p).unwrap(), inside);
        assert_eq!(
            clamp_action(Action::new(f64::NAN, 0.0), &p),
            Err(DynamicsError::NonFinite("speed"))
        );
        assert_eq!(
            clamp_action(Action::new(0.0, f64::INFINITY), &p),
            Err(DynamicsError::NonFinite("steering"))
        );
    }

    #[test]
    fn straight_line_and_zero_speed() {
        let p = VehicleParams::default();
        let s = step_kinematics(&origin(), Action::new(0.5, 0.0), 0.05, &p);
        assert!((s.pose.x - 0.025).abs() < 1e-15);
        assert_eq!((s.pose.y, s.pose.yaw), (0.0, 0.0));

        let start = AgentState {
            pose: Pose::new(0.3, -0.2, 1.1),
            ..Default::default()
        };
        let s = step_kinematics(&start, Action::new(0.0, 0.4), 0.05, &p);
        assert_eq!(s.pose, start.pose);
    }

    #[test]
    fn default_params_are_valid() {
        let p = VehicleParams::default();
        p.validate().unwrap();
        assert!((p.diagonal() * 1.2 - 0.2147).abs() < 1e-4);
        let bad = VehicleParams {
            rear_to_cg: 0.2,
            ..p
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn yaw_stays_wrapped(yaw in -10.0f64..10.0, v in -0.8f64..0.8, d in -0.61f64..0.61, n in 1usize..200) {
            let p = VehicleParams::default();
            let mut s = AgentState { pose: Pose::new(0.0, 0.0, wrap_angle(yaw)), ..Default::default() };
            for _ in 0..n {
                s = step_kinematics(&s, Action::new(v, d), 0.05, &p);
                prop_assert!(s.pose.yaw > -std::f64::consts::PI && s.pose.yaw <= std::f64::consts::PI);
            }
        }

        #[test]
        fn mirrored_steering_mirrors_trajectory(v in -0.8f64..0.8, d in -0.61f64..0.61, n in 1usize..100) {
            let p = VehicleParams::default();
            let (mut a, mut b) = (origin(), origin());
            for _ in 0..n {
                a = step_kinematics(&a, Action::new(v, d), 0.05, &p);
                b = step_kinematics(&b, Action::new(v, -d), 0.05, &p);
            }
            prop_assert!((a.pose.x - b.pose.x).abs() < 1e-12);
            prop_assert!((a.pose.y + b.pose.y).abs() < 1e-12);
        }

        #[test]
        fn zero_steer_keeps_heading(yaw in -3.0f64..3.0, v in -0.8f64..0.8, n in 1usize..100) {
            let p = VehicleParams::default();
            let start = AgentState { pose: Pose::new(0.0, 0.0, yaw), ..Default::default() };
            let mut s = start;
            for _ in 0..n {
                s = step_kinematics(&s, Action::new(v, 0.0), 0.05, &p);
            }
            prop_assert_eq!(s.pose.yaw, yaw);
            let disp = s.position() - start.position();
            prop_assert!(disp.cross(Vec2::from_angle(yaw)).abs() < 1e-12);
        }

        #[test]
        fn clamped_speed_within_limits(v in -100.0f64..100.0, d in -3.0f64..3.0) {
            let p = VehicleParams::default();
            let a = clamp_action(Action::new(v, d), &p).unwrap();
            let s = step_kinematics(&origin(), a, 0.05, &p);
            prop_assert!(s.speed.abs() <= 0.8);
        }
    }
}
