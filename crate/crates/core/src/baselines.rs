//! Centralized reference solutions: the two naive policies, exhaustive oracles
//! for both system objectives, Nash equilibrium enumeration and a
//! cross-entropy optimizer.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Evaluator;
use crate::model::{DecisionProfile, Instance};
use crate::real::Real;

/// Default cap on `(M + 1)^N` for exhaustive scans.
pub const ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Maximize the number of offloading users subject to every one of them being beneficial.
    MaxBeneficial,
    /// Minimize the system-wide overhead.
    MinOverhead,
}

impl Objective {
    /// Whether `a` is strictly better than `b` under this objective.
    pub fn better<T: Real>(self, a: T, b: T) -> bool {
        match self {
            Objective::MaxBeneficial => a > b,
            Objective::MinOverhead => a < b,
        }
    }

    fn order<T: Real>(self, a: T, b: T) -> Ordering {
        let ord = a.partial_cmp(&b).unwrap_or(Ordering::Equal);
        match self {
            Objective::MaxBeneficial => ord.reverse(),
            Objective::MinOverhead => ord,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum<T> {
    pub profile: DecisionProfile,
    pub value: T,
}

pub fn all_local<T: Real>(instance: &Instance<T>) -> DecisionProfile {
    DecisionProfile::all_local(instance.len())
}

/// Every user offloads over a channel drawn uniformly from `1..=M`.
pub fn all_cloud_random<T: Real>(instance: &Instance<T>, seed: u64) -> DecisionProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = instance.channels();
    DecisionProfile((0..instance.len()).map(|_| rng.gen_range(1..=m)).collect())
}

/// Lexicographic walk over all `(M + 1)^N` decision profiles.
#[derive(Debug, Clone)]
pub struct ProfileSpace {
    current: Option<Vec<usize>>,
    channels: usize,
}

impl ProfileSpace {
    pub fn new(users: usize, channels: usize) -> Self {
        Self { current: Some(vec![0; users]), channels }
    }
}

impl Iterator for ProfileSpace {
    type Item = DecisionProfile;

    fn next(&mut self) -> Option<DecisionProfile> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut carried = true;
        for d in next.iter_mut().rev() {
            if *d < self.channels {
                *d += 1;
                carried = false;
                break;
            }
            *d = 0;
        }
        self.current = if carried { None } else { Some(next) };
        Some(DecisionProfile(out))
    }
}

fn check_cap<T: Real>(instance: &Instance<T>, cap: u128) -> Result<()> {
    let size = instance.profile_count();
    if size > cap {
        return Err(Error::InstanceTooLarge { size, cap });
    }
    Ok(())
}

/// Objective value of a profile; `None` when it violates the beneficiality constraint.
pub fn objective_value<T: Real>(eval: &Evaluator<'_, T>, objective: Objective, a: &DecisionProfile) -> Option<T> {
    match objective {
        Objective::MaxBeneficial => {
            eval.all_cloud_beneficial(a).then(|| T::from_count(a.cloud_users()))
        }
        Objective::MinOverhead => Some(eval.system_overhead(a)),
    }
}

pub fn exhaustive_optimize<T: Real>(instance: &Instance<T>, objective: Objective) -> Result<Optimum<T>> {
    exhaustive_optimize_capped(instance, objective, ENUMERATION_CAP)
}

/// Scans every profile; ties go to the lexicographically smallest.
pub fn exhaustive_optimize_capped<T: Real>(
    instance: &Instance<T>,
    objective: Objective,
    cap: u128,
) -> Result<Optimum<T>> {
    check_cap(instance, cap)?;
    let eval = Evaluator::for_instance(instance);
    let mut best: Option<Optimum<T>> = None;
    for a in ProfileSpace::new(instance.len(), instance.channels()) {
        let Some(value) = objective_value(&eval, objective, &a) else { continue };
        if best.as_ref().is_none_or(|b| objective.better(value, b.value)) {
            best = Some(Optimum { profile: a, value });
        }
    }
    // the all-local profile is always feasible
    Ok(best.expect("profile space is nonempty"))
}

pub fn enumerate_nash<T: Real>(instance: &Instance<T>) -> Result<Vec<DecisionProfile>> {
    enumerate_nash_capped(instance, ENUMERATION_CAP)
}

/// All pure Nash equilibria, in lexicographic order.
pub fn enumerate_nash_capped<T: Real>(instance: &Instance<T>, cap: u128) -> Result<Vec<DecisionProfile>> {
    check_cap(instance, cap)?;
    let eval = Evaluator::for_instance(instance);
    Ok(ProfileSpace::new(instance.len(), instance.channels()).filter(|a| eval.is_nash(a)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeParams {
    /// Profiles sampled per iteration.
    pub samples: usize,
    /// Fraction of samples kept as elite.
    pub elite_fraction: f64,
    /// Weight of the elite refit in the smoothed update.
    pub smoothing: f64,
    pub iterations: usize,
    /// Stop once every user's most likely decision has at least `1 − tol` mass.
    pub degenerate_tol: f64,
}

impl Default for CeParams {
    fn default() -> Self {
        Self { samples: 200, elite_fraction: 0.1, smoothing: 0.7, iterations: 100, degenerate_tol: 1e-3 }
    }
}

impl CeParams {
    /// Larger budget with slower smoothing, for instances with tens of users
    /// where the default converges too early on the overhead objective.
    pub fn thorough() -> Self {
        Self { samples: 2000, elite_fraction: 0.02, smoothing: 0.5, iterations: 300, degenerate_tol: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeOutcome<T> {
    pub profile: DecisionProfile,
    pub value: T,
    pub iterations: usize,
    /// 1-based iteration in which the returned profile was first sampled.
    pub found_at: usize,
    /// Best-ever objective after each iteration.
    pub history: Vec<T>,
}

/// Drops offloading users that are not beneficial. Removing users only lowers
/// interference, so every remaining offloader stays beneficial.
pub fn repair<T: Real>(eval: &Evaluator<'_, T>, a: &DecisionProfile) -> DecisionProfile {
    let loads = eval.loads(a);
    DecisionProfile(
        (0..a.len())
            .map(|n| if a[n] > 0 && !eval.is_beneficial_at(n, a, &loads) { 0 } else { a[n] })
            .collect(),
    )
}

fn sample_decision(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (d, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return d;
        }
    }
    // rounding left u above the total mass; fall back to the last supported decision
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Cross-entropy search over per-user categorical decision distributions.
pub fn cross_entropy_optimize<T: Real>(
    instance: &Instance<T>,
    objective: Objective,
    params: &CeParams,
    seed: u64,
) -> CeOutcome<T> {
    let eval = Evaluator::for_instance(instance);
    let n_users = instance.len();
    let options = instance.channels() + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = vec![vec![1.0 / options as f64; options]; n_users];
    let samples = params.samples.max(1);
    let elite = ((params.elite_fraction * samples as f64).ceil() as usize).clamp(1, samples);

    let mut best: Option<(DecisionProfile, T, usize)> = None;
    let mut history = Vec::new();
    let mut iterations = 0;

    for it in 1..=params.iterations {
        iterations = it;
        let mut scored: Vec<(DecisionProfile, T)> = (0..samples)
            .map(|_| {
                let raw = DecisionProfile(table.iter().map(|row| sample_decision(row, rng.gen::<f64>())).collect());
                match objective {
                    Objective::MaxBeneficial => {
                        let fixed = repair(&eval, &raw);
                        let value = T::from_count(fixed.cloud_users());
                        (fixed, value)
                    }
                    Objective::MinOverhead => {
                        let value = eval.system_overhead(&raw);
                        (raw, value)
                    }
                }
            })
            .collect();
        scored.sort_by(|a, b| objective.order(a.1, b.1));

        let (top, top_value) = (&scored[0].0, scored[0].1);
        if best.as_ref().is_none_or(|b| objective.better(top_value, b.1)) {
            best = Some((top.clone(), top_value, it));
        }
        history.push(best.as_ref().expect("set above").1);

        let mut fit = vec![vec![0.0; options]; n_users];
        for (a, _) in &scored[..elite] {
            for (n, &d) in a.as_slice().iter().enumerate() {
                fit[n][d] += 1.0 / elite as f64;
            }
        }
        for (row, fitted) in table.iter_mut().zip(&fit) {
            for (p, &f) in row.iter_mut().zip(fitted) {
                *p = params.smoothing * f + (1.0 - params.smoothing) * *p;
            }
        }
        let degenerate = table
            .iter()
            .all(|row| row.iter().copied().fold(0.0, f64::max) >= 1.0 - params.degenerate_tol);
        if degenerate {
            break;
        }
    }

    let (profile, value, found_at) = best.unwrap_or_else(|| {
        let a = DecisionProfile::all_local(n_users);
        let v = objective_value(&eval, objective, &a).expect("all-local is feasible");
        (a, v, 0)
    });
    CeOutcome { profile, value, iterations, found_at, history }
}
