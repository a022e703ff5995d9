//! Price of anarchy for both system metrics, with the analytic bounds.
//!
//! The worst-case equilibrium comes from full enumeration, so these reports
//! are only available on instances small enough to scan.

use serde::{Deserialize, Serialize};

use crate::baselines::{self, Objective};
use crate::error::{Error, Result};
use crate::game::{self, Evaluator};
use crate::model::{self, AccessModel, ChannelEnv, Instance, Threshold, UserProfile};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoaMetric {
    BeneficialUsers,
    SystemOverhead,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoaReport<T> {
    pub metric: PoaMetric,
    pub equilibria: usize,
    /// Worst equilibrium value: fewest beneficial users, or largest overhead.
    pub worst_nash: T,
    pub optimum: T,
    pub ratio: T,
    /// Lower bound (beneficial users) or upper bound (system overhead).
    pub bound: Option<T>,
    /// Why `bound` is absent.
    pub bound_note: Option<String>,
    pub q_max: T,
    pub q_min: T,
    /// `None` when some user is never beneficial.
    pub t_max: Option<T>,
    pub t_min: Option<T>,
}

struct Extremes<T> {
    q_max: T,
    q_min: T,
    t_max: Option<T>,
    t_min: Option<T>,
}

fn extremes<T: Real>(eval: &Evaluator<'_, T>) -> Extremes<T> {
    let q_max = eval.weights().iter().copied().fold(T::neg_infinity(), T::max);
    let q_min = eval.weights().iter().copied().fold(T::infinity(), T::min);
    let thresholds: Option<Vec<T>> = (0..eval.len()).map(|n| eval.threshold(n).finite()).collect();
    let (t_max, t_min) = match thresholds {
        Some(ts) => (
            Some(ts.iter().copied().fold(T::neg_infinity(), T::max)),
            Some(ts.iter().copied().fold(T::infinity(), T::min)),
        ),
        None => (None, None),
    };
    Extremes { q_max, q_min, t_max, t_min }
}

/// `⌊T_min / Q_max⌋ / (⌊T_max / Q_min⌋ + 1)`.
pub fn beneficial_bound<T: Real>(t_min: T, q_max: T, t_max: T, q_min: T) -> T {
    (t_min / q_max).floor() / ((t_max / q_min).floor() + T::one())
}

/// Worst-case beneficial-user count over all equilibria relative to the
/// constrained optimum; 1 when the optimum itself is 0.
pub fn poa_beneficial<T: Real>(instance: &Instance<T>) -> Result<PoaReport<T>> {
    let eval = Evaluator::for_instance(instance);
    let nash = baselines::enumerate_nash(instance)?;
    let optimum = baselines::exhaustive_optimize(instance, Objective::MaxBeneficial)?.value;
    let worst = nash
        .iter()
        .map(|a| T::from_count(eval.count_beneficial(a)))
        .fold(T::infinity(), T::min);
    let ratio = if optimum == T::zero() { T::one() } else { worst / optimum };

    let ext = extremes(&eval);
    let (bound, bound_note) = match (ext.t_min, ext.t_max) {
        (Some(t_min), Some(t_max)) if t_min >= T::zero() && ext.q_min > T::zero() => {
            (Some(beneficial_bound(t_min, ext.q_max, t_max, ext.q_min)), None)
        }
        (Some(_), Some(_)) if ext.q_min > T::zero() => (None, Some("some threshold is negative".to_string())),
        (Some(_), Some(_)) => (None, Some("minimum access weight is zero".to_string())),
        _ => (None, Some("some user is never beneficial".to_string())),
    };

    Ok(PoaReport {
        metric: PoaMetric::BeneficialUsers,
        equilibria: nash.len(),
        worst_nash: worst,
        optimum,
        ratio,
        bound,
        bound_note,
        q_max: ext.q_max,
        q_min: ext.q_min,
        t_max: ext.t_max,
        t_min: ext.t_min,
    })
}

/// `(K^c_min, K^c_max)`: cloud overhead on an empty channel, and under the
/// average interference `Σ_{i≠n} Q_i / M` from everyone else.
pub fn k_cloud_extremes<T: Real>(env: &ChannelEnv<T>, users: &[UserProfile<T>], n: usize) -> Result<(T, T)> {
    if env.access_model != AccessModel::Interference {
        return Err(Error::ContentionUnsupported);
    }
    let others = users
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != n)
        .fold(T::zero(), |acc, (_, u)| acc + game::access_weight(env, u).get());
    let spread = others / T::from_count(env.channels);
    Ok((
        model::cloud_overhead_at(env, &users[n], T::zero()),
        model::cloud_overhead_at(env, &users[n], spread),
    ))
}

/// `Σ min{K^m, K^c_max} / Σ min{K^m, K^c_min}`.
pub fn overhead_bound<T: Real>(env: &ChannelEnv<T>, users: &[UserProfile<T>]) -> Result<T> {
    let mut upper = T::zero();
    let mut lower = T::zero();
    for (n, u) in users.iter().enumerate() {
        let (k_min, k_max) = k_cloud_extremes(env, users, n)?;
        let local = model::local_overhead(u);
        upper += local.min(k_max);
        lower += local.min(k_min);
    }
    Ok(upper / lower)
}

/// Worst-case equilibrium overhead relative to the minimum system overhead.
pub fn poa_overhead<T: Real>(instance: &Instance<T>) -> Result<PoaReport<T>> {
    let eval = Evaluator::for_instance(instance);
    let nash = baselines::enumerate_nash(instance)?;
    let optimum = baselines::exhaustive_optimize(instance, Objective::MinOverhead)?.value;
    let worst = nash.iter().map(|a| eval.system_overhead(a)).fold(T::neg_infinity(), T::max);
    let ratio = if optimum > T::zero() {
        worst / optimum
    } else if worst == T::zero() {
        T::one()
    } else {
        T::infinity()
    };

    let (bound, bound_note) = match overhead_bound(&instance.env, &instance.users) {
        Ok(b) => (Some(b), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let ext = extremes(&eval);
    Ok(PoaReport {
        metric: PoaMetric::SystemOverhead,
        equilibria: nash.len(),
        worst_nash: worst,
        optimum,
        ratio,
        bound,
        bound_note,
        q_max: ext.q_max,
        q_min: ext.q_min,
        t_max: ext.t_max,
        t_min: ext.t_min,
    })
}

/// Whether every threshold is finite and nonnegative, the precondition of the
/// beneficial-users bound.
pub fn thresholds_nonnegative<T: Real>(instance: &Instance<T>) -> bool {
    instance
        .users
        .iter()
        .all(|u| matches!(model::beneficial_threshold(&instance.env, u), Threshold::Finite(t) if t >= T::zero()))
}
