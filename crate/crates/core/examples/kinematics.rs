//! Integrates the single-track model at constant inputs and compares the
//! CG path against the slip-angle circle.

use lanegym::dynamics::{clamp_action, step_kinematics, Action, AgentState, VehicleParams};

fn main() -> anyhow::Result<()> {
    let p = VehicleParams::default();
    let a = clamp_action(Action::new(0.8, 1.0), &p)?;
    println!(
        "requested steering 1.0 rad, clamped to {:.4} rad",
        a.steering
    );

    let beta = p.slip_angle(a.steering);
    let radius = p.rear_to_cg / beta.sin();
    // the circle centre sits one radius to the left of the initial course
    let (cx, cy) = (-radius * beta.sin(), radius * beta.cos());
    println!("slip angle {beta:.4} rad, circle radius {radius:.4} m");

    for dt in [0.05, 0.01, 0.001] {
        let mut s = AgentState::default();
        let mut worst: f64 = 0.0;
        for _ in 0..(3.0 / dt) as usize {
            s = step_kinematics(&s, a, dt, &p);
            worst = worst.max(((s.pose.x - cx).hypot(s.pose.y - cy) - radius).abs());
        }
        println!("dt {dt:<6} max radial error over 3 s: {worst:.2e} m");
    }
    Ok(())
}
