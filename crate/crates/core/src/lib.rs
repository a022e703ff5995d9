//! Multi-user computation offloading game for mobile-edge cloud computing.
//!
//! Users either compute a task locally or offload it over one of `M` shared
//! wireless channels. Co-channel users slow each other down, which makes the
//! decisions a potential game. This crate provides the model, the game layer,
//! the slotted distributed offloading simulator, centralized baselines and
//! price-of-anarchy analysis.
//!
//! Model code is generic over the scalar type ([`Real`]: `f32` or `f64`); the
//! aliases below fix it to `f64`, with `*32` variants for `f32`.
//!
//! Finding the constrained centralized optimum is NP-hard in general; the
//! exhaustive oracles in [`baselines`] scale as `(M + 1)^N` and are capped.

// `!(x > 0)` style checks are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod dco;
pub mod error;
pub mod game;
pub mod metrics;
pub mod model;
pub mod real;
pub mod scenario;

pub use baselines::{CeParams, Objective};
pub use error::{Error, Result};
pub use model::{AccessModel, DecisionProfile, Threshold};
pub use real::Real;
pub use scenario::{GenParams, Scenario};

pub type ChannelEnv = model::ChannelEnv<f64>;
pub type UserProfile = model::UserProfile<f64>;
pub type Instance = model::Instance<f64>;
pub type RunReport = dco::RunReport<f64>;
pub type SlotRecord = dco::SlotRecord<f64>;
pub type PoaReport = metrics::PoaReport<f64>;
pub type Optimum = baselines::Optimum<f64>;
pub type CeOutcome = baselines::CeOutcome<f64>;
pub type BestResponseSet = game::BestResponseSet<f64>;

pub type ChannelEnv32 = model::ChannelEnv<f32>;
pub type UserProfile32 = model::UserProfile<f32>;
pub type Instance32 = model::Instance<f32>;
pub type RunReport32 = dco::RunReport<f32>;
