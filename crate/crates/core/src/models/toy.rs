//! Hand-built finite instances used as solver oracles.

use rand::Rng;

use crate::extended::ExtendedReal;
use crate::numerics::StreamFactory;
use crate::solve::{DenseSpec, FiniteMDP};

const NEG_INF: f64 = f64::NEG_INFINITY;

fn ext(v: f64) -> ExtendedReal {
    ExtendedReal::new(v).expect("no +inf in fixtures")
}

/// 3 states, 2 actions, horizon 3, started in state 0, with one `-inf`
/// reward at `(t=2, s=2, a=1)`.
pub fn toy_finite_mdp() -> FiniteMDP {
    let rows = vec![
        vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.25, 0.75]],
        vec![vec![0.25, 0.5, 0.25], vec![0.0, 0.0, 1.0]],
        vec![vec![0.5, 0.0, 0.5], vec![0.125, 0.375, 0.5]],
    ];
    let rewards = [
        [[1.0, 1.5], [0.0, 2.0], [-1.0, 0.5]],
        [[0.5, 0.25], [0.75, -0.5], [1.25, NEG_INF]],
        [[0.0, 1.0], [2.0, 0.125], [3.0, -0.75]],
    ];
    let spec = DenseSpec {
        states: vec![vec![0.0, 1.0, 2.0]; 3],
        actions: vec![vec![vec![0.0, 1.0]; 3]; 3],
        rewards: rewards.iter().map(|t| t.iter().map(|s| s.iter().map(|&r| ext(r)).collect()).collect()).collect(),
        transitions: vec![rows.clone(), rows],
        initial: vec![1.0, 0.0, 0.0],
    };
    FiniteMDP::from_dense(spec).expect("fixture is valid")
}

/// Random instance with dyadic rewards in `[-2, 2]`, about one `-inf`
/// reward in ten, and rows with probabilities in multiples of `1/8`.
pub fn random_finite_mdp(seed: u64, n_states: usize, n_actions: usize, horizon: usize) -> FiniteMDP {
    let mut rng = StreamFactory::new(seed).stream("random-finite-mdp", 0);
    let row = |rng: &mut dyn rand::RngCore| {
        let mut counts = vec![0u32; n_states];
        for _ in 0..8 {
            counts[rng.random_range(0..n_states)] += 1;
        }
        counts.into_iter().map(|c| c as f64 / 8.0).collect::<Vec<f64>>()
    };
    let states = vec![(0..n_states).map(|s| s as f64).collect::<Vec<_>>(); horizon];
    let actions = vec![vec![(0..n_actions).map(|a| a as f64).collect::<Vec<_>>(); n_states]; horizon];
    let rewards = (0..horizon)
        .map(|_| {
            (0..n_states)
                .map(|_| {
                    (0..n_actions)
                        .map(|_| {
                            if rng.random_bool(0.1) {
                                ExtendedReal::NEG_INF
                            } else {
                                ext(rng.random_range(-16..=16) as f64 / 8.0)
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let transitions = (1..horizon)
        .map(|_| (0..n_states).map(|_| (0..n_actions).map(|_| row(&mut rng)).collect()).collect())
        .collect();
    let initial = row(&mut rng);
    FiniteMDP::from_dense(DenseSpec { states, actions, rewards, transitions, initial })
        .expect("generated instance is valid")
}
