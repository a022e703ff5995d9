#![allow(dead_code)]

use offload_core::model::{AccessModel, ChannelEnv, Instance, Threshold, UserProfile};
use offload_core::{model, DecisionProfile};
use rand::Rng;

pub fn env(model: AccessModel, channels: usize) -> ChannelEnv<f64> {
    ChannelEnv { channels, bandwidth: 1.0, noise: if model == AccessModel::Interference { 1.0 } else { 0.0 }, access_model: model }
}

/// Normalized-unit user whose local and cloud overheads are of the same order,
/// so random instances mix beneficial, marginal and never-beneficial users.
pub fn random_user<R: Rng>(rng: &mut R) -> UserProfile<f64> {
    let weight_energy = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) };
    UserProfile {
        power: rng.gen_range(0.5..10.0),
        gain: rng.gen_range(0.1..1.0),
        input_bits: rng.gen_range(0.2..2.0),
        cycles: rng.gen_range(0.5..5.0),
        device_cpu: rng.gen_range(0.5..1.5),
        cloud_cpu: rng.gen_range(2.0..20.0),
        energy_per_cycle: rng.gen_range(0.0..0.5),
        tail_energy: rng.gen_range(0.0..0.3),
        weight_time: if weight_energy == 0.0 { 1.0 } else { 1.0 - weight_energy / 2.0 },
        weight_energy,
        contention_weight: rng.gen_range(0.5..4.0),
        peak_rate: rng.gen_range(0.5..6.0),
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, model: AccessModel, users: usize, channels: usize) -> Instance<f64> {
    let users = (0..users).map(|_| random_user(rng)).collect();
    Instance::new(env(model, channels), users).expect("generated instance is valid")
}

pub fn random_model<R: Rng>(rng: &mut R) -> AccessModel {
    if rng.gen_bool(0.5) {
        AccessModel::Interference
    } else {
        AccessModel::Contention
    }
}

/// Random instance in which every user has a finite threshold `T ≥ 0`.
pub fn random_nonnegative_instance<R: Rng>(
    rng: &mut R,
    model: AccessModel,
    users: usize,
    channels: usize,
) -> Instance<f64> {
    let env = env(model, channels);
    let users = (0..users)
        .map(|_| loop {
            let u = random_user(rng);
            if matches!(model::beneficial_threshold(&env, &u), Threshold::Finite(t) if t >= 0.0) {
                break u;
            }
        })
        .collect();
    Instance::new(env, users).expect("generated instance is valid")
}

/// Instance whose access weights and thresholds are nonnegative integers.
///
/// Every user has `D = 1` (`d = 2`, `f_m = 1`, `f_c = 2`, time only). Under
/// contention `T = (R − 1) W` with integer `R`, `W`; under interference with
/// `ϖ0 = w = 1`, `b = k` and `q = j (2^k − 1)`, `T = j − 1`.
pub fn random_integer_instance<R: Rng>(
    rng: &mut R,
    model: AccessModel,
    users: usize,
    channels: usize,
) -> Instance<f64> {
    let base = UserProfile::<f64> { cycles: 2.0, device_cpu: 1.0, cloud_cpu: 2.0, ..UserProfile::default() };
    let users = (0..users)
        .map(|_| match model {
            AccessModel::Contention => UserProfile {
                contention_weight: rng.gen_range(1..=4) as f64,
                peak_rate: rng.gen_range(1..=6) as f64,
                ..base.clone()
            },
            AccessModel::Interference => {
                let k = rng.gen_range(1..=2);
                let j = rng.gen_range(1..=5);
                UserProfile {
                    input_bits: k as f64,
                    power: (j * ((1 << k) - 1)) as f64,
                    ..base.clone()
                }
            }
        })
        .collect();
    Instance::new(env(model, channels), users).expect("generated instance is valid")
}

pub fn random_profile<R: Rng>(rng: &mut R, users: usize, channels: usize) -> DecisionProfile {
    DecisionProfile((0..users).map(|_| rng.gen_range(0..=channels)).collect())
}
