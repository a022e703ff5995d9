//! Game-theoretic layer: access weights, received interference, the potential
//! function, best responses and Nash verification.
//!
//! Both access models are handled through one per-user access weight `Q_n`
//! (`q_n g_n` under interference, `W_n` under contention). Received
//! interference on channel `m` follows the base-station measurement rule: the
//! channel load `ρ_m`, minus the user's own weight when it already sits on `m`.

use serde::{Deserialize, Serialize};

use crate::model::{self, AccessModel, ChannelEnv, DecisionProfile, Instance, Threshold, UserProfile};
use crate::real::Real;

/// Absolute tolerance for membership in the argmin of a best response.
pub const ARGMIN_TOLERANCE: f64 = 1e-12;

/// Unified access weight `Q_n`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccessWeight<T>(pub T);

impl<T: Real> AccessWeight<T> {
    pub fn get(self) -> T {
        self.0
    }
}

pub fn access_weight<T: Real>(env: &ChannelEnv<T>, u: &UserProfile<T>) -> AccessWeight<T> {
    AccessWeight(match env.access_model {
        AccessModel::Interference => u.power * u.gain,
        AccessModel::Contention => u.contention_weight,
    })
}

/// Load `ρ_m`: total access weight of the users on channel `m`, summed in user order.
pub fn channel_load<T: Real>(env: &ChannelEnv<T>, users: &[UserProfile<T>], m: usize, a: &DecisionProfile) -> T {
    users
        .iter()
        .zip(a.as_slice())
        .filter(|(_, &d)| d == m && m > 0)
        .fold(T::zero(), |acc, (u, _)| acc + access_weight(env, u).get())
}

/// Interference `μ_n(m, a_{-n})` that user `n` would see on channel `m`.
pub fn received_interference<T: Real>(
    env: &ChannelEnv<T>,
    users: &[UserProfile<T>],
    n: usize,
    m: usize,
    a: &DecisionProfile,
) -> T {
    let load = channel_load(env, users, m, a);
    if a[n] == m {
        load - access_weight(env, &users[n]).get()
    } else {
        load
    }
}

/// Threshold entering the potential: finite thresholds as-is, never-beneficial
/// users at the limit of the formula as the offload budget shrinks to zero
/// (`−ϖ0` under interference, `−W` under contention).
pub fn potential_threshold<T: Real>(env: &ChannelEnv<T>, u: &UserProfile<T>) -> T {
    match model::beneficial_threshold(env, u) {
        Threshold::Finite(t) => t,
        Threshold::NeverBeneficial => match env.access_model {
            AccessModel::Interference => -env.noise,
            AccessModel::Contention => -u.contention_weight,
        },
    }
}

/// Potential `Φ(a) = ½ Σ_i Σ_{j≠i} Q_i Q_j 1{a_i = a_j > 0} + Σ_i Q_i T_i 1{a_i = 0}`.
pub fn potential<T: Real>(env: &ChannelEnv<T>, users: &[UserProfile<T>], a: &DecisionProfile) -> T {
    Evaluator::new(env, users).potential(a)
}

/// Decisions that strictly improve a user's overhead and attain the minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponseSet<T> {
    /// Ascending decision indices; empty when no strict improvement exists.
    pub decisions: Vec<usize>,
    /// Minimum overhead over all decisions.
    pub best: T,
    /// Overhead of the current decision.
    pub current: T,
}

impl<T: Real> BestResponseSet<T> {
    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    /// Lowest-index member, the deterministic pick used by the simulator.
    pub fn first(&self) -> Option<usize> {
        self.decisions.first().copied()
    }
}

pub fn best_response_set<T: Real>(
    env: &ChannelEnv<T>,
    users: &[UserProfile<T>],
    n: usize,
    a: &DecisionProfile,
) -> BestResponseSet<T> {
    let eval = Evaluator::new(env, users);
    let loads = eval.loads(a);
    eval.best_response(n, a, &loads)
}

/// Nash equilibrium test: no user has a strictly improving unilateral deviation.
pub fn is_nash<T: Real>(env: &ChannelEnv<T>, users: &[UserProfile<T>], a: &DecisionProfile) -> bool {
    Evaluator::new(env, users).is_nash(a)
}

/// Number of users that offload and are beneficial.
pub fn count_beneficial<T: Real>(env: &ChannelEnv<T>, users: &[UserProfile<T>], a: &DecisionProfile) -> usize {
    Evaluator::new(env, users).count_beneficial(a)
}

/// Per-instance cache of access weights, thresholds and local overheads.
///
/// Every quantity is evaluated with the same arithmetic as the free functions
/// in this module and in [`crate::model`], so results agree bit for bit.
#[derive(Debug, Clone)]
pub struct Evaluator<'a, T> {
    env: &'a ChannelEnv<T>,
    users: &'a [UserProfile<T>],
    weights: Vec<T>,
    thresholds: Vec<Threshold<T>>,
    potential_thresholds: Vec<T>,
    local: Vec<T>,
}

impl<'a, T: Real> Evaluator<'a, T> {
    pub fn new(env: &'a ChannelEnv<T>, users: &'a [UserProfile<T>]) -> Self {
        Self {
            env,
            users,
            weights: users.iter().map(|u| access_weight(env, u).get()).collect(),
            thresholds: users.iter().map(|u| model::beneficial_threshold(env, u)).collect(),
            potential_thresholds: users.iter().map(|u| potential_threshold(env, u)).collect(),
            local: users.iter().map(model::local_overhead).collect(),
        }
    }

    pub fn for_instance(instance: &'a Instance<T>) -> Self {
        Self::new(&instance.env, &instance.users)
    }

    pub fn env(&self) -> &ChannelEnv<T> {
        self.env
    }

    pub fn users(&self) -> &[UserProfile<T>] {
        self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn channels(&self) -> usize {
        self.env.channels
    }

    pub fn weight(&self, n: usize) -> T {
        self.weights[n]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn threshold(&self, n: usize) -> Threshold<T> {
        self.thresholds[n]
    }

    pub fn local_overhead(&self, n: usize) -> T {
        self.local[n]
    }

    /// Channel loads indexed by channel; entry 0 is unused and stays zero.
    pub fn loads(&self, a: &DecisionProfile) -> Vec<T> {
        let mut loads = vec![T::zero(); self.env.channels + 1];
        for (&d, &q) in a.as_slice().iter().zip(&self.weights) {
            if d > 0 {
                loads[d] += q;
            }
        }
        loads
    }

    pub fn interference(&self, n: usize, m: usize, a: &DecisionProfile, loads: &[T]) -> T {
        if a[n] == m {
            loads[m] - self.weights[n]
        } else {
            loads[m]
        }
    }

    /// Overhead of user `n` if it took `decision` while the rest of `a` stays put.
    pub fn overhead_of(&self, n: usize, decision: usize, a: &DecisionProfile, loads: &[T]) -> T {
        match decision {
            0 => self.local[n],
            m => model::cloud_overhead_at(self.env, &self.users[n], self.interference(n, m, a, loads)),
        }
    }

    pub fn overheads(&self, a: &DecisionProfile, loads: &[T]) -> Vec<T> {
        (0..self.users.len()).map(|n| self.overhead_of(n, a[n], a, loads)).collect()
    }

    pub fn system_overhead(&self, a: &DecisionProfile) -> T {
        let loads = self.loads(a);
        (0..self.users.len()).fold(T::zero(), |acc, n| acc + self.overhead_of(n, a[n], a, &loads))
    }

    pub fn best_response(&self, n: usize, a: &DecisionProfile, loads: &[T]) -> BestResponseSet<T> {
        let values: Vec<T> = (0..=self.env.channels).map(|d| self.overhead_of(n, d, a, loads)).collect();
        let current = values[a[n]];
        let best = values.iter().copied().fold(T::infinity(), T::min);
        let decisions = if best < current {
            let tol = T::lit(ARGMIN_TOLERANCE);
            values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v - best <= tol && v < current)
                .map(|(d, _)| d)
                .collect()
        } else {
            Vec::new()
        };
        BestResponseSet { decisions, best, current }
    }

    /// Whether user `n` has any strictly improving deviation.
    pub fn can_improve(&self, n: usize, a: &DecisionProfile, loads: &[T]) -> bool {
        let current = self.overhead_of(n, a[n], a, loads);
        (0..=self.env.channels).any(|d| d != a[n] && self.overhead_of(n, d, a, loads) < current)
    }

    pub fn is_nash(&self, a: &DecisionProfile) -> bool {
        let loads = self.loads(a);
        (0..self.users.len()).all(|n| !self.can_improve(n, a, &loads))
    }

    pub fn is_beneficial_at(&self, n: usize, a: &DecisionProfile, loads: &[T]) -> bool {
        a[n] > 0 && self.overhead_of(n, a[n], a, loads) <= self.local[n]
    }

    pub fn count_beneficial(&self, a: &DecisionProfile) -> usize {
        let loads = self.loads(a);
        (0..self.users.len()).filter(|&n| self.is_beneficial_at(n, a, &loads)).count()
    }

    /// Whether every offloading user in `a` is beneficial.
    pub fn all_cloud_beneficial(&self, a: &DecisionProfile) -> bool {
        let loads = self.loads(a);
        (0..self.users.len()).all(|n| a[n] == 0 || self.is_beneficial_at(n, a, &loads))
    }

    pub fn potential(&self, a: &DecisionProfile) -> T {
        let n_users = self.users.len();
        let mut pairs = T::zero();
        for i in 0..n_users {
            if a[i] == 0 {
                continue;
            }
            for j in (i + 1)..n_users {
                if a[j] == a[i] {
                    pairs += self.weights[i] * self.weights[j];
                }
            }
        }
        let local = (0..n_users)
            .filter(|&i| a[i] == 0)
            .fold(T::zero(), |acc, i| acc + self.weights[i] * self.potential_thresholds[i]);
        pairs + local
    }
}
