use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use offload_core::{AccessModel, CeParams, GenParams, Objective};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "offload-game", version, about = "Multi-user computation offloading game: traces, sweeps and oracles")]
pub struct Cli {
    /// Worker threads for seed sweeps.
    #[arg(long, global = true, env = "OFFLOAD_GAME_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a scenario document.
    Gen(GenCmd),
    /// Run the distributed offloading algorithm once and dump its slot trace.
    Trace(TraceCmd),
    /// Multi-seed sweep over the number of users.
    Sweep(SweepCmd),
    /// Compare DCO equilibria with exhaustive optima and cross-entropy on small instances.
    Oracle(OracleCmd),
    /// Price of anarchy of one scenario.
    Poa(PoaCmd),
    /// Cross-entropy optimization of one scenario.
    Ce(CeCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelArg {
    Interference,
    Contention,
}

impl From<ModelArg> for AccessModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Interference => AccessModel::Interference,
            ModelArg::Contention => AccessModel::Contention,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveArg {
    MaxBeneficial,
    MinOverhead,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MaxBeneficial => Objective::MaxBeneficial,
            ObjectiveArg::MinOverhead => Objective::MinOverhead,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Default,
    Thorough,
}

impl Budget {
    pub fn params(self) -> CeParams {
        match self {
            Budget::Default => CeParams::default(),
            Budget::Thorough => CeParams::thorough(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Precision {
    F32,
    F64,
}

/// Generator flags other than the user count.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GenFlags {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub radius_m: Option<f64>,
    #[arg(long)]
    pub path_loss: Option<f64>,
    #[arg(long)]
    pub min_distance_m: Option<f64>,
    #[arg(long)]
    pub w_hz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub noise_dbm: Option<f64>,
    #[arg(long)]
    pub q_mw: Option<f64>,
    #[arg(long)]
    pub b_kb: Option<f64>,
    #[arg(long)]
    pub d_megacycles: Option<f64>,
    /// Comma-separated choice set.
    #[arg(long, value_delimiter = ',')]
    pub f_m_ghz: Option<Vec<f64>>,
    #[arg(long)]
    pub f_c_ghz: Option<f64>,
    /// Comma-separated choice set.
    #[arg(long, value_delimiter = ',')]
    pub lambda_e: Option<Vec<f64>>,
    #[arg(long)]
    pub gamma_j_per_cycle: Option<f64>,
    #[arg(long)]
    pub l_j: Option<f64>,
    #[arg(long, value_enum)]
    pub access_model: Option<ModelArg>,
    /// Comma-separated choice set for contention weights.
    #[arg(long, value_delimiter = ',')]
    pub w_choices: Option<Vec<f64>>,
    #[arg(long)]
    pub r_bps: Option<f64>,
}

impl GenFlags {
    pub fn params(&self, n: Option<usize>) -> GenParams {
        let d = GenParams::default();
        GenParams {
            n: n.unwrap_or(d.n),
            m: self.m.unwrap_or(d.m),
            radius_m: self.radius_m.unwrap_or(d.radius_m),
            path_loss: self.path_loss.unwrap_or(d.path_loss),
            min_distance_m: self.min_distance_m.unwrap_or(d.min_distance_m),
            w_hz: self.w_hz.unwrap_or(d.w_hz),
            noise_dbm: self.noise_dbm.unwrap_or(d.noise_dbm),
            q_mw: self.q_mw.unwrap_or(d.q_mw),
            b_kb: self.b_kb.unwrap_or(d.b_kb),
            d_megacycles: self.d_megacycles.unwrap_or(d.d_megacycles),
            f_m_ghz: self.f_m_ghz.clone().unwrap_or(d.f_m_ghz),
            f_c_ghz: self.f_c_ghz.unwrap_or(d.f_c_ghz),
            lambda_e: self.lambda_e.clone().unwrap_or(d.lambda_e),
            gamma_j_per_cycle: self.gamma_j_per_cycle.unwrap_or(d.gamma_j_per_cycle),
            l_j: self.l_j.unwrap_or(d.l_j),
            access_model: self.access_model.map(Into::into).unwrap_or(d.access_model),
            w_choices: self.w_choices.clone().unwrap_or(d.w_choices),
            r_bps: self.r_bps.unwrap_or(d.r_bps),
        }
    }
}

/// Where a single-scenario command gets its instance from.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Source {
    /// Scenario document to load; otherwise one is generated from the flags.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Seed for generation and for the run itself.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub gen: GenFlags,
}

#[derive(Debug, Args, Serialize)]
pub struct GenCmd {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub gen: GenFlags,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TraceCmd {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    pub precision: Precision,
    /// Refuse instances with more than this many user-channel pairs.
    #[arg(long)]
    pub work_cap: Option<u128>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepCmd {
    /// User counts, `A..B` (inclusive) or a single value.
    #[arg(long, value_parser = parse_range, default_value = "15..50")]
    #[serde(serialize_with = "ser_range")]
    pub n: RangeInclusive<usize>,
    #[arg(long, default_value_t = 5)]
    pub step: usize,
    /// Seeds per user count.
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    #[command(flatten)]
    pub gen: GenFlags,
    /// Also run cross-entropy on both objectives with this budget.
    #[arg(long, value_enum)]
    pub ce: Option<Budget>,
    /// Write each run's slot trace under `runs/`.
    #[arg(long)]
    pub keep_runs: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleCmd {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    #[command(flatten)]
    pub gen: GenFlags,
    #[arg(long, value_enum, default_value_t = Budget::Default)]
    pub ce: Budget,
    /// Cap on `(M + 1)^N` for exhaustive scans.
    #[arg(long, default_value_t = offload_core::baselines::ENUMERATION_CAP)]
    pub cap: u128,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PoaCmd {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = offload_core::baselines::ENUMERATION_CAP)]
    pub cap: u128,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CeCmd {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxBeneficial)]
    pub objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = Budget::Default)]
    pub budget: Budget,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub elite_fraction: Option<f64>,
    #[arg(long)]
    pub smoothing: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

impl CeCmd {
    pub fn params(&self) -> CeParams {
        let base = self.budget.params();
        CeParams {
            samples: self.samples.unwrap_or(base.samples),
            elite_fraction: self.elite_fraction.unwrap_or(base.elite_fraction),
            smoothing: self.smoothing.unwrap_or(base.smoothing),
            iterations: self.iterations.unwrap_or(base.iterations),
            degenerate_tol: base.degenerate_tol,
        }
    }
}

pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad count {t:?}: {e}"));
    let range = match s.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let v = parse(s)?;
            v..=v
        }
    };
    if range.is_empty() {
        return Err(format!("empty range {s:?}"));
    }
    Ok(range)
}

fn ser_range<S: serde::Serializer>(r: &RangeInclusive<usize>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}..{}", r.start(), r.end()))
}
