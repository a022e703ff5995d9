//! Slotted distributed computation offloading.
//!
//! Every slot the base station measures the load on each channel, each user
//! derives its best-response set from those measurements, users with a
//! nonempty set send a request-to-update (RTU), and the cloud grants the update
//! permission (UP) to one requester drawn uniformly at random. The run ends at
//! the first slot in which nobody asks to update (END).

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Evaluator;
use crate::model::{DecisionProfile, Instance, Threshold};
use crate::real::Real;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DcoOptions {
    /// Refuse instances whose per-slot work `N·M` exceeds this cap.
    pub work_cap: Option<u128>,
}

/// One measurement + update round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord<T> {
    pub slot: usize,
    /// Profile in force during the slot, before any update.
    pub profile: DecisionProfile,
    pub potential: T,
    pub overheads: Vec<T>,
    pub system_overhead: T,
    pub beneficial: usize,
    /// Users that sent an RTU message, ascending.
    pub rtu: Vec<usize>,
    pub updater: Option<usize>,
    pub new_decision: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport<T> {
    pub fingerprint: String,
    pub seed: u64,
    pub slots: Vec<SlotRecord<T>>,
    pub terminal: DecisionProfile,
    /// Slots in which a user updated its decision.
    pub update_slots: usize,
    /// All slots including the final one without RTU messages.
    pub total_slots: usize,
    pub is_nash: bool,
    pub beneficial: usize,
    pub system_overhead: T,
    pub potential: T,
}

impl<T: Real> RunReport<T> {
    /// Per-slot CSV: `slot,phi,system_overhead,beneficial_count,updater,new_decision`.
    pub fn write_slots_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["slot", "phi", "system_overhead", "beneficial_count", "updater", "new_decision"])?;
        for s in &self.slots {
            w.write_record([
                s.slot.to_string(),
                s.potential.to_string(),
                s.system_overhead.to_string(),
                s.beneficial.to_string(),
                s.updater.map(|u| u.to_string()).unwrap_or_default(),
                s.new_decision.map(|d| d.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// RNG for the cloud's pick among RTU senders in `slot`: ChaCha keyed by the
/// run seed, with the slot as stream id.
pub fn selection_rng(seed: u64, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(slot as u64);
    rng
}

pub fn run_dco<T: Real>(instance: &Instance<T>, seed: u64) -> Result<RunReport<T>> {
    run_dco_with(instance, seed, &DcoOptions::default())
}

pub fn run_dco_with<T: Real>(instance: &Instance<T>, seed: u64, options: &DcoOptions) -> Result<RunReport<T>> {
    instance.validate()?;
    if let Some(cap) = options.work_cap {
        let work = instance.len() as u128 * instance.channels() as u128;
        if work > cap {
            return Err(Error::InstanceTooLarge { size: work, cap });
        }
    }
    let eval = Evaluator::for_instance(instance);
    let n_users = instance.len();
    let mut profile = DecisionProfile::all_local(n_users);
    let mut slots = Vec::new();

    for slot in 0.. {
        let loads = eval.loads(&profile);
        let overheads = eval.overheads(&profile, &loads);
        let system_overhead = overheads.iter().fold(T::zero(), |acc, &z| acc + z);
        let beneficial = (0..n_users).filter(|&n| eval.is_beneficial_at(n, &profile, &loads)).count();
        let potential = eval.potential(&profile);

        let responses: Vec<_> = (0..n_users).map(|n| eval.best_response(n, &profile, &loads)).collect();
        let rtu: Vec<usize> = (0..n_users).filter(|&n| !responses[n].is_empty()).collect();

        let mut record = SlotRecord {
            slot,
            profile: profile.clone(),
            potential,
            overheads,
            system_overhead,
            beneficial,
            rtu,
            updater: None,
            new_decision: None,
        };
        if record.rtu.is_empty() {
            slots.push(record);
            break;
        }

        let pick = selection_rng(seed, slot).gen_range(0..record.rtu.len());
        let updater = record.rtu[pick];
        let decision = responses[updater].first().expect("RTU sender has a best response");
        record.updater = Some(updater);
        record.new_decision = Some(decision);
        slots.push(record);

        profile.0[updater] = decision;
        // Φ must fall; ties are tolerated only at the rounding level of the
        // scalar, which single precision reaches with weights near 1e-9.
        let after = eval.potential(&profile);
        let slack = T::epsilon() * (potential.abs() + after.abs());
        if !(after < potential || after - potential <= slack) {
            return Err(Error::NonDecreasingPotential { slot, before: potential.as_f64(), after: after.as_f64() });
        }
    }

    let last = slots.last().expect("at least one slot");
    Ok(RunReport {
        fingerprint: instance.fingerprint(),
        seed,
        terminal: profile.clone(),
        update_slots: slots.len() - 1,
        total_slots: slots.len(),
        is_nash: eval.is_nash(&profile),
        beneficial: last.beneficial,
        system_overhead: last.system_overhead,
        potential: last.potential,
        slots,
    })
}

/// Worst-case number of update slots for instances whose access weights and
/// thresholds are all nonnegative integers:
/// `⌊(Q_max² N² + 2 Q_max T_max N) / (2 Q_min)⌋`.
pub fn convergence_bound<T: Real>(instance: &Instance<T>) -> Result<u64> {
    let eval = Evaluator::for_instance(instance);
    let as_integer = |what: &str, n: usize, v: T| -> Result<u128> {
        let x = v.as_f64();
        if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x < 9.007_199_254_740_992e15 {
            Ok(x as u128)
        } else {
            Err(Error::BoundInapplicable(format!("{what} of user {n} is not a nonnegative integer: {x}")))
        }
    };
    let mut q_max = 0u128;
    let mut q_min = u128::MAX;
    let mut t_max = 0u128;
    for n in 0..instance.len() {
        let q = as_integer("access weight", n, eval.weight(n))?;
        let t = match eval.threshold(n) {
            Threshold::Finite(t) => as_integer("threshold", n, t)?,
            Threshold::NeverBeneficial => {
                return Err(Error::BoundInapplicable(format!("user {n} is never beneficial")));
            }
        };
        q_max = q_max.max(q);
        q_min = q_min.min(q);
        t_max = t_max.max(t);
    }
    if instance.is_empty() {
        return Ok(0);
    }
    if q_min == 0 {
        return Err(Error::BoundInapplicable("minimum access weight is zero".into()));
    }
    let n = instance.len() as u128;
    let numerator = q_max * q_max * n * n + 2 * q_max * t_max * n;
    Ok((numerator / (2 * q_min)) as u64)
}

/// Real-valued `Q_max²/(2 Q_min) N² + Q_max T_max / Q_min · N`, for reference
/// on instances with finite nonnegative thresholds but non-integer weights.
pub fn convergence_bound_value<T: Real>(instance: &Instance<T>) -> Result<f64> {
    let eval = Evaluator::for_instance(instance);
    let mut q_max = 0.0f64;
    let mut q_min = f64::INFINITY;
    let mut t_max = 0.0f64;
    for n in 0..instance.len() {
        let q = eval.weight(n).as_f64();
        let t = match eval.threshold(n) {
            Threshold::Finite(t) if t >= T::zero() => t.as_f64(),
            _ => return Err(Error::BoundInapplicable(format!("threshold of user {n} is not nonnegative"))),
        };
        q_max = q_max.max(q);
        q_min = q_min.min(q);
        t_max = t_max.max(t);
    }
    if !(q_min > 0.0) {
        return Err(Error::BoundInapplicable("minimum access weight is zero".into()));
    }
    let n = instance.len() as f64;
    Ok(q_max * q_max / (2.0 * q_min) * n * n + q_max * t_max / q_min * n)
}
