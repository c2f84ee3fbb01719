//! Steps several seeded instances in lockstep and reports rewards and resets.

use lanegym::dynamics::Action;
use lanegym::env::{BatchedEnv, EnvConfig, ResetMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let cfg = EnvConfig {
        scenario: "mini_roundabout".into(),
        num_agents: 4,
        batch_size: 8,
        reset_mode: ResetMode::TrainResetAll,
        ..Default::default()
    };
    let mut batch = BatchedEnv::new(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut returns = vec![0.0; batch.len()];
    let mut episodes = vec![0u32; batch.len()];
    for _ in 0..400 {
        let actions: Vec<Vec<Action>> = (0..batch.len())
            .map(|_| {
                (0..4)
                    .map(|_| Action::new(rng.random_range(0.0..0.8), rng.random_range(-0.4..0.4)))
                    .collect()
            })
            .collect();
        for (e, out) in batch.step(&actions)?.iter().enumerate() {
            returns[e] += out.rewards.iter().sum::<f64>();
            episodes[e] += u32::from(out.reset.iter().any(|&r| r));
        }
    }
    for (e, (r, n)) in returns.iter().zip(&episodes).enumerate() {
        println!("instance {e}: summed reward {r:9.2}, {n} resets");
    }
    Ok(())
}
