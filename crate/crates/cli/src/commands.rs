use std::fs;

use anyhow::{Context, Result};
use offload_core::baselines::{self, Objective};
use offload_core::dco::{self, DcoOptions};
use offload_core::game::Evaluator;
use offload_core::metrics;
use offload_core::scenario::{self, Scenario};
use offload_core::model::Instance;
use offload_core::{GenParams, Real};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{CeCmd, GenCmd, OracleCmd, PoaCmd, Precision, Source, SweepCmd, TraceCmd};
use crate::output::{envelope, opt, OutDir};
use crate::ConfigError;

fn load_source(source: &Source) -> Result<Scenario> {
    match &source.scenario {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read scenario {}: {e}", path.display())))?;
            Ok(scenario::load_scenario(&text).with_context(|| format!("loading {}", path.display()))?)
        }
        None => Ok(scenario::generate(&source.gen.params(source.n), source.seed)?),
    }
}

fn source_params(source: &Source) -> Option<GenParams> {
    source.scenario.is_none().then(|| source.gen.params(source.n))
}

pub fn gen(cmd: &GenCmd) -> Result<()> {
    let scenario = scenario::generate(&cmd.gen.params(cmd.n), cmd.seed)?;
    let out = OutDir::create(&cmd.out)?;
    out.write_text("scenario.json", &(scenario::save_scenario(&scenario) + "\n"))?;
    println!("{} users, fingerprint {}", scenario.instance().len(), scenario.instance().fingerprint());
    Ok(())
}

#[derive(Serialize)]
struct TraceSummary {
    seed: u64,
    fingerprint: String,
    update_slots: usize,
    total_slots: usize,
    is_nash: bool,
    beneficial: usize,
    initial_overhead: f64,
    system_overhead: f64,
    potential: f64,
}

fn trace_with<T: Real + Serialize>(cmd: &TraceCmd, scenario: &Scenario, out: &OutDir) -> Result<TraceSummary> {
    let instance: Instance<T> = scenario.instance_as()?;
    let report = dco::run_dco_with(&instance, cmd.source.seed, &DcoOptions { work_cap: cmd.work_cap })?;
    report.write_slots_csv(fs::File::create(out.path("slots.csv"))?)?;
    out.write_json("report.json", &envelope("trace", cmd, source_params(&cmd.source), &report))?;
    Ok(TraceSummary {
        seed: report.seed,
        fingerprint: report.fingerprint.clone(),
        update_slots: report.update_slots,
        total_slots: report.total_slots,
        is_nash: report.is_nash,
        beneficial: report.beneficial,
        initial_overhead: report.slots[0].system_overhead.as_f64(),
        system_overhead: report.system_overhead.as_f64(),
        potential: report.potential.as_f64(),
    })
}

pub fn trace(cmd: &TraceCmd) -> Result<()> {
    let scenario = load_source(&cmd.source)?;
    let out = OutDir::create(&cmd.out)?;
    out.write_text("scenario.json", &(scenario::save_scenario(&scenario) + "\n"))?;
    let summary = match cmd.precision {
        Precision::F64 => trace_with::<f64>(cmd, &scenario, &out)?,
        Precision::F32 => trace_with::<f32>(cmd, &scenario, &out)?,
    };
    let mut w = out.csv("summary.csv")?;
    w.serialize(&summary)?;
    w.flush()?;
    println!(
        "{} update slots, beneficial {}, overhead {} -> {}, nash {}",
        summary.update_slots, summary.beneficial, summary.initial_overhead, summary.system_overhead, summary.is_nash
    );
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    n: usize,
    seed: u64,
    fingerprint: String,
    update_slots: usize,
    dco_beneficial: usize,
    random_beneficial: usize,
    dco_overhead: f64,
    local_overhead: f64,
    random_overhead: f64,
    ce_beneficial: Option<f64>,
    ce_overhead: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    n: usize,
    runs: usize,
    mean_update_slots: f64,
    mean_dco_beneficial: f64,
    mean_random_beneficial: f64,
    mean_dco_overhead: f64,
    mean_local_overhead: f64,
    mean_random_overhead: f64,
    mean_ce_beneficial: Option<f64>,
    mean_ce_overhead: Option<f64>,
}

fn sweep_one(cmd: &SweepCmd, n: usize, seed: u64, out: &OutDir) -> Result<SweepRow> {
    let scenario = scenario::generate(&cmd.gen.params(Some(n)), seed)?;
    let inst = scenario.instance();
    let eval = Evaluator::for_instance(inst);
    let report = dco::run_dco(inst, seed)?;
    if cmd.keep_runs {
        report.write_slots_csv(fs::File::create(out.path(&format!("runs/n{n}_seed{seed}.csv")))?)?;
    }
    let random = baselines::all_cloud_random(inst, seed);
    let (ce_beneficial, ce_overhead) = match cmd.ce {
        Some(budget) => {
            let params = budget.params();
            let b = baselines::cross_entropy_optimize(inst, Objective::MaxBeneficial, &params, seed).value;
            let o = baselines::cross_entropy_optimize(inst, Objective::MinOverhead, &params, seed).value;
            (Some(b), Some(o))
        }
        None => (None, None),
    };
    Ok(SweepRow {
        n,
        seed,
        fingerprint: report.fingerprint.clone(),
        update_slots: report.update_slots,
        dco_beneficial: report.beneficial,
        random_beneficial: eval.count_beneficial(&random),
        dco_overhead: report.system_overhead,
        local_overhead: eval.system_overhead(&baselines::all_local(inst)),
        random_overhead: eval.system_overhead(&random),
        ce_beneficial,
        ce_overhead,
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    sum / count as f64
}

pub fn sweep(cmd: &SweepCmd) -> Result<()> {
    if cmd.step == 0 {
        return Err(ConfigError("--step must be positive".into()).into());
    }
    // validate once up front so a bad flag fails before any work is spread out
    cmd.gen.params(Some(*cmd.n.start())).validate()?;
    let out = OutDir::create(&cmd.out)?;
    if cmd.keep_runs {
        fs::create_dir_all(out.path("runs"))?;
    }
    let sizes: Vec<usize> = cmd.n.clone().step_by(cmd.step).collect();
    let jobs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| (cmd.seed_base..cmd.seed_base + cmd.seeds).map(move |s| (n, s)))
        .collect();
    let mut rows = jobs.par_iter().map(|&(n, seed)| sweep_one(cmd, n, seed, &out)).collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));

    let mut w = out.csv("runs.csv")?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;

    let summaries: Vec<SweepSummary> = sizes
        .iter()
        .map(|&n| {
            let group: Vec<&SweepRow> = rows.iter().filter(|r| r.n == n).collect();
            let m = |f: &dyn Fn(&SweepRow) -> f64| mean(group.iter().map(|r| f(r)));
            let ce = |f: &dyn Fn(&SweepRow) -> Option<f64>| -> Option<f64> {
                let vals: Option<Vec<f64>> = group.iter().map(|r| f(r)).collect();
                vals.map(|v| mean(v.into_iter()))
            };
            SweepSummary {
                n,
                runs: group.len(),
                mean_update_slots: m(&|r| r.update_slots as f64),
                mean_dco_beneficial: m(&|r| r.dco_beneficial as f64),
                mean_random_beneficial: m(&|r| r.random_beneficial as f64),
                mean_dco_overhead: m(&|r| r.dco_overhead),
                mean_local_overhead: m(&|r| r.local_overhead),
                mean_random_overhead: m(&|r| r.random_overhead),
                mean_ce_beneficial: ce(&|r| r.ce_beneficial),
                mean_ce_overhead: ce(&|r| r.ce_overhead),
            }
        })
        .collect();
    let mut w = out.csv("summary.csv")?;
    for s in &summaries {
        w.serialize(s)?;
    }
    w.flush()?;
    out.write_json("report.json", &envelope("sweep", cmd, Some(cmd.gen.params(Some(*cmd.n.start()))), &summaries))?;
    println!("{} runs over {} user counts", rows.len(), sizes.len());
    Ok(())
}

#[derive(Debug, Serialize)]
struct OracleRow {
    seed: u64,
    fingerprint: String,
    equilibria: usize,
    dco_beneficial: usize,
    opt_beneficial: f64,
    ce_beneficial: f64,
    dco_overhead: f64,
    opt_overhead: f64,
    ce_overhead: f64,
    poa_beneficial: f64,
    poa_beneficial_bound: Option<f64>,
    poa_overhead: f64,
    poa_overhead_bound: Option<f64>,
}

fn oracle_params(cmd: &OracleCmd) -> GenParams {
    GenParams { m: cmd.gen.m.unwrap_or(2), ..cmd.gen.params(Some(cmd.n)) }
}

fn oracle_one(cmd: &OracleCmd, seed: u64) -> Result<OracleRow> {
    let scenario = scenario::generate(&oracle_params(cmd), seed)?;
    let inst = scenario.instance();
    let nash = baselines::enumerate_nash_capped(inst, cmd.cap)?;
    let report = dco::run_dco(inst, seed)?;
    let opt_b = baselines::exhaustive_optimize_capped(inst, Objective::MaxBeneficial, cmd.cap)?;
    let opt_o = baselines::exhaustive_optimize_capped(inst, Objective::MinOverhead, cmd.cap)?;
    let ce_params = cmd.ce.params();
    let ce_b = baselines::cross_entropy_optimize(inst, Objective::MaxBeneficial, &ce_params, seed);
    let ce_o = baselines::cross_entropy_optimize(inst, Objective::MinOverhead, &ce_params, seed);
    let poa_b = metrics::poa_beneficial(inst)?;
    let poa_o = metrics::poa_overhead(inst)?;
    Ok(OracleRow {
        seed,
        fingerprint: report.fingerprint,
        equilibria: nash.len(),
        dco_beneficial: report.beneficial,
        opt_beneficial: opt_b.value,
        ce_beneficial: ce_b.value,
        dco_overhead: report.system_overhead,
        opt_overhead: opt_o.value,
        ce_overhead: ce_o.value,
        poa_beneficial: poa_b.ratio,
        poa_beneficial_bound: poa_b.bound,
        poa_overhead: poa_o.ratio,
        poa_overhead_bound: poa_o.bound,
    })
}

pub fn oracle(cmd: &OracleCmd) -> Result<()> {
    let out = OutDir::create(&cmd.out)?;
    let seeds: Vec<u64> = (cmd.seed_base..cmd.seed_base + cmd.seeds).collect();
    let mut rows = seeds.par_iter().map(|&s| oracle_one(cmd, s)).collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.seed);
    let mut w = out.csv("summary.csv")?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    out.write_json("report.json", &envelope("oracle", cmd, Some(oracle_params(cmd)), &rows))?;
    let ce_hits = rows.iter().filter(|r| r.ce_beneficial == r.opt_beneficial).count();
    println!("{} instances, CE reached the beneficial optimum in {ce_hits}", rows.len());
    Ok(())
}

#[derive(Serialize)]
struct PoaResult {
    fingerprint: String,
    beneficial_users: offload_core::PoaReport,
    system_overhead: offload_core::PoaReport,
}

pub fn poa(cmd: &PoaCmd) -> Result<()> {
    let scenario = load_source(&cmd.source)?;
    let inst = scenario.instance();
    baselines::enumerate_nash_capped(inst, cmd.cap)?;
    let out = OutDir::create(&cmd.out)?;
    out.write_text("scenario.json", &(scenario::save_scenario(&scenario) + "\n"))?;
    let result = PoaResult {
        fingerprint: inst.fingerprint(),
        beneficial_users: metrics::poa_beneficial(inst)?,
        system_overhead: metrics::poa_overhead(inst)?,
    };
    let mut w = out.csv("summary.csv")?;
    w.write_record(["metric", "equilibria", "worst_nash", "optimum", "ratio", "bound"])?;
    for (name, r) in [("beneficial_users", &result.beneficial_users), ("system_overhead", &result.system_overhead)] {
        w.write_record([
            name.to_string(),
            r.equilibria.to_string(),
            r.worst_nash.to_string(),
            r.optimum.to_string(),
            r.ratio.to_string(),
            opt(r.bound),
        ])?;
    }
    w.flush()?;
    out.write_json("report.json", &envelope("poa", cmd, source_params(&cmd.source), &result))?;
    println!("PoA beneficial {} overhead {}", result.beneficial_users.ratio, result.system_overhead.ratio);
    Ok(())
}

pub fn ce(cmd: &CeCmd) -> Result<()> {
    let scenario = load_source(&cmd.source)?;
    let inst = scenario.instance();
    let out = OutDir::create(&cmd.out)?;
    out.write_text("scenario.json", &(scenario::save_scenario(&scenario) + "\n"))?;
    let outcome = baselines::cross_entropy_optimize(inst, cmd.objective.into(), &cmd.params(), cmd.source.seed);
    let mut w = out.csv("summary.csv")?;
    w.write_record(["iteration", "best"])?;
    for (i, v) in outcome.history.iter().enumerate() {
        w.write_record([(i + 1).to_string(), v.to_string()])?;
    }
    w.flush()?;
    out.write_json("report.json", &envelope("ce", cmd, source_params(&cmd.source), &outcome))?;
    println!("best {} after {} iterations", outcome.value, outcome.iterations);
    Ok(())
}
