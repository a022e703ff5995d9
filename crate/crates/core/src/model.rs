//! Communication and computation model: uplink rates, local and cloud
//! overheads, and the interference threshold below which offloading pays off.
//!
//! All quantities are in consistent SI units: bits, seconds, joules, hertz and
//! watts. The scenario layer converts from the user-facing document units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game;
use crate::real::Real;

/// How co-channel users degrade each other's uplink rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessModel {
    /// Signal-level sharing (CDMA-like): Shannon rate with co-channel interference.
    Interference,
    /// Packet-level sharing (CSMA-like): weighted proportional share of a peak rate.
    Contention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelEnv<T> {
    /// Number of wireless channels `M`.
    pub channels: usize,
    /// Channel bandwidth in hertz.
    pub bandwidth: T,
    /// Background noise power in watts.
    pub noise: T,
    pub access_model: AccessModel,
}

impl<T: Real> ChannelEnv<T> {
    pub fn validate(&self) -> Result<()> {
        if self.channels == 0 {
            return Err(Error::InvalidEnv("channel count must be at least 1".into()));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > T::zero()) {
            return Err(Error::InvalidEnv(format!("bandwidth must be positive, got {}", self.bandwidth)));
        }
        let noise_ok = match self.access_model {
            AccessModel::Interference => self.noise.is_finite() && self.noise > T::zero(),
            AccessModel::Contention => self.noise.is_finite() && self.noise >= T::zero(),
        };
        if !noise_ok {
            return Err(Error::InvalidEnv(format!("noise power out of range: {}", self.noise)));
        }
        Ok(())
    }
}

/// Per-user physical constants and decision weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile<T> {
    /// Transmit power (watts).
    pub power: T,
    /// Channel gain to the base station.
    pub gain: T,
    /// Computation input size (bits).
    pub input_bits: T,
    /// CPU cycles needed by the task.
    pub cycles: T,
    /// Device CPU rate (cycles/second).
    pub device_cpu: T,
    /// Cloud CPU rate assigned to the user (cycles/second).
    pub cloud_cpu: T,
    /// Device energy per CPU cycle (joules/cycle).
    pub energy_per_cycle: T,
    /// Tail energy after transmission (joules).
    pub tail_energy: T,
    pub weight_time: T,
    pub weight_energy: T,
    /// Share weight under the contention model.
    pub contention_weight: T,
    /// Peak rate under the contention model (bits/second).
    pub peak_rate: T,
}

impl<T: Real> Default for UserProfile<T> {
    fn default() -> Self {
        let one = T::one();
        Self {
            power: one,
            gain: one,
            input_bits: one,
            cycles: one,
            device_cpu: one,
            cloud_cpu: one,
            energy_per_cycle: T::zero(),
            tail_energy: T::zero(),
            weight_time: one,
            weight_energy: T::zero(),
            contention_weight: one,
            peak_rate: one,
        }
    }
}

impl<T: Real> UserProfile<T> {
    pub fn validate(&self, env: &ChannelEnv<T>, user: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidUser { user, reason });
        let zero = T::zero();
        let fields = [
            ("power", self.power, true),
            ("gain", self.gain, true),
            ("input_bits", self.input_bits, false),
            ("cycles", self.cycles, false),
            ("device_cpu", self.device_cpu, false),
            ("cloud_cpu", self.cloud_cpu, false),
            ("energy_per_cycle", self.energy_per_cycle, true),
            ("tail_energy", self.tail_energy, true),
        ];
        for (name, value, zero_ok) in fields {
            let ok = value.is_finite() && if zero_ok { value >= zero } else { value > zero };
            if !ok {
                let rel = if zero_ok { ">= 0" } else { "> 0" };
                return bad(format!("{name} must be finite and {rel}, got {value}"));
            }
        }
        for (name, value) in [("weight_time", self.weight_time), ("weight_energy", self.weight_energy)] {
            if !(value >= zero && value <= T::one()) {
                return bad(format!("{name} must lie in [0, 1], got {value}"));
            }
        }
        if self.weight_time == zero && self.weight_energy == zero {
            return bad("decision weights are both zero".into());
        }
        if self.offload_coefficient() <= zero {
            return bad("offloading has no time or energy cost (weight_time = 0 and power = 0)".into());
        }
        if env.access_model == AccessModel::Contention {
            let positive = |v: T| v.is_finite() && v > zero;
            if !positive(self.contention_weight) || !positive(self.peak_rate) {
                return bad("contention weight and peak rate must be positive".into());
            }
        }
        Ok(())
    }

    /// Local execution time `d / f_m`.
    pub fn local_time(&self) -> T {
        self.cycles / self.device_cpu
    }

    /// Local execution energy `γ d`.
    pub fn local_energy(&self) -> T {
        self.energy_per_cycle * self.cycles
    }

    /// Cloud execution time `d / f_c`.
    pub fn cloud_time(&self) -> T {
        self.cycles / self.cloud_cpu
    }

    /// `(λ_t + λ_e q) b`: weighted cost of pushing the input over a unit-rate link.
    pub fn offload_coefficient(&self) -> T {
        (self.weight_time + self.weight_energy * self.power) * self.input_bits
    }

    /// Margin `K^m − λ_e L − λ_t t_exe` that the transmission cost has to fit into.
    pub fn offload_budget(&self) -> T {
        self.weight_time * self.local_time() + self.weight_energy * self.local_energy()
            - self.weight_energy * self.tail_energy
            - self.weight_time * self.cloud_time()
    }
}

/// A game instance: the channel environment plus every user's constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance<T> {
    pub env: ChannelEnv<T>,
    pub users: Vec<UserProfile<T>>,
}

impl<T: Real> Instance<T> {
    pub fn new(env: ChannelEnv<T>, users: Vec<UserProfile<T>>) -> Result<Self> {
        let instance = Self { env, users };
        instance.validate()?;
        Ok(instance)
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        for (n, u) in self.users.iter().enumerate() {
            u.validate(&self.env, n)?;
        }
        Ok(())
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

    /// SHA-256 over the bit patterns of every model constant, hex encoded.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update((self.env.channels as u64).to_le_bytes());
        h.update([self.env.access_model as u8]);
        for v in [self.env.bandwidth, self.env.noise] {
            h.update(v.as_f64().to_bits().to_le_bytes());
        }
        for u in &self.users {
            for v in [
                u.power,
                u.gain,
                u.input_bits,
                u.cycles,
                u.device_cpu,
                u.cloud_cpu,
                u.energy_per_cycle,
                u.tail_energy,
                u.weight_time,
                u.weight_energy,
                u.contention_weight,
                u.peak_rate,
            ] {
                h.update(v.as_f64().to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    /// Number of decision profiles, `(M + 1)^N`, saturating at `u128::MAX`.
    pub fn profile_count(&self) -> u128 {
        let base = self.env.channels as u128 + 1;
        let mut count: u128 = 1;
        for _ in 0..self.users.len() {
            count = count.saturating_mul(base);
        }
        count
    }
}

/// Decision of every user: `0` computes locally, `m ∈ 1..=M` offloads over channel `m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecisionProfile(pub Vec<usize>);

impl DecisionProfile {
    pub fn all_local(users: usize) -> Self {
        Self(vec![0; users])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn cloud_users(&self) -> usize {
        self.0.iter().filter(|&&d| d > 0).count()
    }

    /// Checks length and range against an instance.
    pub fn check<T: Real>(&self, instance: &Instance<T>) -> Result<()> {
        if self.0.len() != instance.len() {
            return Err(Error::LengthMismatch { expected: instance.len(), got: self.0.len() });
        }
        let channels = instance.channels();
        match self.0.iter().position(|&d| d > channels) {
            Some(user) => Err(Error::DecisionOutOfRange { user, decision: self.0[user], channels }),
            None => Ok(()),
        }
    }
}

impl std::ops::Index<usize> for DecisionProfile {
    type Output = usize;

    fn index(&self, n: usize) -> &usize {
        &self.0[n]
    }
}

impl From<Vec<usize>> for DecisionProfile {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl std::fmt::Display for DecisionProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Interference tolerance of a user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold<T> {
    /// Offloading is beneficial iff received interference `μ ≤ T`.
    Finite(T),
    /// Offloading never beats local computing, even on an empty channel.
    NeverBeneficial,
}

impl<T: Real> Threshold<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Threshold::Finite(t) => Some(t),
            Threshold::NeverBeneficial => None,
        }
    }

    pub fn admits(self, interference: T) -> bool {
        matches!(self, Threshold::Finite(t) if interference <= t)
    }
}

/// Uplink rate of a user facing `interference` from co-channel users.
pub fn rate_at<T: Real>(env: &ChannelEnv<T>, u: &UserProfile<T>, interference: T) -> T {
    match env.access_model {
        AccessModel::Interference => {
            let sinr = u.power * u.gain / (env.noise + interference);
            env.bandwidth * sinr.ln_1p() / T::LN_2()
        }
        AccessModel::Contention => {
            u.peak_rate * u.contention_weight / (u.contention_weight + interference)
        }
    }
}

/// Cloud overhead `λ_t (b/r + d/f_c) + λ_e (q b / r + L)` at a given uplink rate.
pub fn cloud_overhead_at_rate<T: Real>(u: &UserProfile<T>, rate: T) -> T {
    let tx_time = u.input_bits / rate;
    let tx_energy = u.power * u.input_bits / rate + u.tail_energy;
    u.weight_time * (tx_time + u.cloud_time()) + u.weight_energy * tx_energy
}

/// Cloud overhead of a user facing `interference` on its channel.
pub fn cloud_overhead_at<T: Real>(env: &ChannelEnv<T>, u: &UserProfile<T>, interference: T) -> T {
    cloud_overhead_at_rate(u, rate_at(env, u, interference))
}

fn cloud_interference<T: Real>(
    env: &ChannelEnv<T>,
    users: &[UserProfile<T>],
    n: usize,
    a: &DecisionProfile,
) -> Result<T> {
    match a[n] {
        0 => Err(Error::LocalDecision(n)),
        m => Ok(game::received_interference(env, users, n, m, a)),
    }
}

/// Uplink rate of user `n` on its chosen channel.
pub fn uplink_rate<T: Real>(
    env: &ChannelEnv<T>,
    users: &[UserProfile<T>],
    n: usize,
    a: &DecisionProfile,
) -> Result<T> {
    let mu = cloud_interference(env, users, n, a)?;
    Ok(rate_at(env, &users[n], mu))
}

/// Local overhead `K^m = λ_t d/f_m + λ_e γ d`.
pub fn local_overhead<T: Real>(u: &UserProfile<T>) -> T {
    u.weight_time * u.local_time() + u.weight_energy * u.local_energy()
}

/// Cloud overhead `K^c(a)` of user `n`.
pub fn cloud_overhead<T: Real>(
    env: &ChannelEnv<T>,
    users: &[UserProfile<T>],
    n: usize,
    a: &DecisionProfile,
) -> Result<T> {
    let mu = cloud_interference(env, users, n, a)?;
    Ok(cloud_overhead_at(env, &users[n], mu))
}

/// Overhead `Z_n(a)`: local overhead when `a[n] = 0`, cloud overhead otherwise.
pub fn user_overhead<T: Real>(env: &ChannelEnv<T>, users: &[UserProfile<T>], n: usize, a: &DecisionProfile) -> T {
    match a[n] {
        0 => local_overhead(&users[n]),
        m => cloud_overhead_at(env, &users[n], game::received_interference(env, users, n, m, a)),
    }
}

/// System-wide overhead `Σ_n Z_n(a)`.
pub fn system_overhead<T: Real>(env: &ChannelEnv<T>, users: &[UserProfile<T>], a: &DecisionProfile) -> T {
    (0..users.len()).fold(T::zero(), |acc, n| acc + user_overhead(env, users, n, a))
}

/// Interference threshold of a user under the environment's access model.
///
/// With `D = λ_t t_m + λ_e e_m − λ_e L − λ_t t_exe` and `c = (λ_t + λ_e q) b`:
/// interference `T = q g / (2^{c/(w D)} − 1) − ϖ0`, contention `T = (D R / c − 1) W`.
pub fn beneficial_threshold<T: Real>(env: &ChannelEnv<T>, u: &UserProfile<T>) -> Threshold<T> {
    let budget = u.offload_budget();
    if !(budget > T::zero()) {
        return Threshold::NeverBeneficial;
    }
    let coeff = u.offload_coefficient();
    match env.access_model {
        AccessModel::Interference => {
            let exponent = coeff / (env.bandwidth * budget);
            Threshold::Finite(u.power * u.gain / (exponent.exp2() - T::one()) - env.noise)
        }
        AccessModel::Contention => {
            Threshold::Finite((budget * u.peak_rate / coeff - T::one()) * u.contention_weight)
        }
    }
}

/// Definition of beneficial offloading: `K^c(a) ≤ K^m`.
pub fn is_beneficial<T: Real>(
    env: &ChannelEnv<T>,
    users: &[UserProfile<T>],
    n: usize,
    a: &DecisionProfile,
) -> Result<bool> {
    Ok(cloud_overhead(env, users, n, a)? <= local_overhead(&users[n]))
}
