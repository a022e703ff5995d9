//! Scenario generation for the small-cell setup and the JSON scenario document.
//!
//! Documents keep user-facing units (mW, dBm, KB, Megacycles, GHz); the model
//! instance is derived from them in SI units. 1 KB is 8·10³ bits and one
//! Megacycle is 10⁶ cycles.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AccessModel, ChannelEnv, Instance, UserProfile};
use crate::real::Real;

pub const DOCUMENT_VERSION: &str = concat!("offload-game/", env!("CARGO_PKG_VERSION"));

pub const BITS_PER_KB: f64 = 8e3;
pub const CYCLES_PER_MEGACYCLE: f64 = 1e6;
pub const HZ_PER_GHZ: f64 = 1e9;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn mw_to_watts(mw: f64) -> f64 {
    mw * 1e-3
}

/// Generator parameters. Defaults reproduce the 50 m small cell with 30 users
/// on 5 channels of 5 MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub radius_m: f64,
    pub path_loss: f64,
    /// Users closer than this are placed at this distance.
    pub min_distance_m: f64,
    pub w_hz: f64,
    pub noise_dbm: f64,
    pub q_mw: f64,
    pub b_kb: f64,
    pub d_megacycles: f64,
    pub f_m_ghz: Vec<f64>,
    pub f_c_ghz: f64,
    pub lambda_e: Vec<f64>,
    pub gamma_j_per_cycle: f64,
    pub l_j: f64,
    pub access_model: AccessModel,
    /// Choice set for contention weights.
    pub w_choices: Vec<f64>,
    pub r_bps: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n: 30,
            m: 5,
            radius_m: 50.0,
            path_loss: 4.0,
            min_distance_m: 1.0,
            w_hz: 5e6,
            noise_dbm: -100.0,
            q_mw: 100.0,
            b_kb: 5000.0,
            d_megacycles: 1000.0,
            f_m_ghz: vec![0.5, 0.8, 1.0],
            f_c_ghz: 10.0,
            lambda_e: vec![1.0, 0.5, 0.0],
            gamma_j_per_cycle: 1e-9,
            l_j: 0.0,
            access_model: AccessModel::Interference,
            w_choices: vec![1.0],
            r_bps: 1e8,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: &str| Err(Error::Schema { path: format!("generator.{path}"), message: message.into() });
        if self.m == 0 {
            return bad("m", "need at least one channel");
        }
        for (path, v) in [
            ("radius_m", self.radius_m),
            ("path_loss", self.path_loss),
            ("min_distance_m", self.min_distance_m),
            ("w_hz", self.w_hz),
            ("q_mw", self.q_mw),
            ("b_kb", self.b_kb),
            ("d_megacycles", self.d_megacycles),
            ("f_c_ghz", self.f_c_ghz),
            ("r_bps", self.r_bps),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(path, "must be positive");
            }
        }
        if !self.noise_dbm.is_finite() {
            return bad("noise_dbm", "must be finite");
        }
        if !(self.gamma_j_per_cycle >= 0.0 && self.l_j >= 0.0) {
            return bad("gamma_j_per_cycle", "energy coefficients must be nonnegative");
        }
        for (path, set, lo, hi) in [
            ("f_m_ghz", &self.f_m_ghz, f64::MIN_POSITIVE, f64::INFINITY),
            ("lambda_e", &self.lambda_e, 0.0, 1.0),
            ("w_choices", &self.w_choices, f64::MIN_POSITIVE, f64::INFINITY),
        ] {
            if set.is_empty() {
                return bad(path, "choice set is empty");
            }
            if set.iter().any(|&v| !(v >= lo && v <= hi && v.is_finite())) {
                return bad(path, "choice out of range");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: Option<u64>,
    pub generator: Option<GenParams>,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvDoc {
    #[serde(rename = "M")]
    pub m: usize,
    pub w_hz: f64,
    pub noise_dbm: f64,
    pub access_model: AccessModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserDoc {
    pub q_mw: f64,
    pub g: f64,
    pub b_kb: f64,
    pub d_megacycles: f64,
    pub f_m_ghz: f64,
    pub f_c_ghz: f64,
    pub gamma_j_per_cycle: f64,
    #[serde(rename = "L_j")]
    pub l_j: f64,
    pub lambda_e: f64,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "R_bps")]
    pub r_bps: f64,
}

impl UserDoc {
    pub fn to_profile<T: Real>(&self) -> UserProfile<T> {
        UserProfile {
            power: T::lit(mw_to_watts(self.q_mw)),
            gain: T::lit(self.g),
            input_bits: T::lit(self.b_kb * BITS_PER_KB),
            cycles: T::lit(self.d_megacycles * CYCLES_PER_MEGACYCLE),
            device_cpu: T::lit(self.f_m_ghz * HZ_PER_GHZ),
            cloud_cpu: T::lit(self.f_c_ghz * HZ_PER_GHZ),
            energy_per_cycle: T::lit(self.gamma_j_per_cycle),
            tail_energy: T::lit(self.l_j),
            weight_time: T::lit(1.0 - self.lambda_e),
            weight_energy: T::lit(self.lambda_e),
            contention_weight: T::lit(self.w),
            peak_rate: T::lit(self.r_bps),
        }
    }
}

/// On-disk scenario: `{meta, env, users}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDocument {
    pub meta: Meta,
    pub env: EnvDoc,
    pub users: Vec<UserDoc>,
}

impl ScenarioDocument {
    pub fn to_instance<T: Real>(&self) -> Result<Instance<T>> {
        let env = ChannelEnv {
            channels: self.env.m,
            bandwidth: T::lit(self.env.w_hz),
            noise: T::lit(dbm_to_watts(self.env.noise_dbm)),
            access_model: self.env.access_model,
        };
        let users = self.users.iter().map(UserDoc::to_profile).collect();
        Instance::new(env, users).map_err(|e| {
            let path = match &e {
                Error::InvalidUser { user, .. } => format!("users[{user}]"),
                _ => "env".to_string(),
            };
            Error::Schema { path, message: e.to_string() }
        })
    }
}

fn default_units() -> BTreeMap<String, String> {
    [
        ("q_mw", "milliwatt"),
        ("g", "dimensionless"),
        ("b_kb", "kilobyte (8e3 bits)"),
        ("d_megacycles", "1e6 CPU cycles"),
        ("f_m_ghz", "1e9 cycles/second"),
        ("f_c_ghz", "1e9 cycles/second"),
        ("gamma_j_per_cycle", "joule/cycle"),
        ("L_j", "joule"),
        ("lambda_e", "dimensionless, lambda_t = 1 - lambda_e"),
        ("W", "dimensionless"),
        ("R_bps", "bit/second"),
        ("w_hz", "hertz"),
        ("noise_dbm", "dBm"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

/// A scenario document together with the model instance derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    document: ScenarioDocument,
    instance: Instance<f64>,
}

impl Scenario {
    pub fn from_document(document: ScenarioDocument) -> Result<Self> {
        let instance = document.to_instance()?;
        Ok(Self { document, instance })
    }

    pub fn document(&self) -> &ScenarioDocument {
        &self.document
    }

    pub fn instance(&self) -> &Instance<f64> {
        &self.instance
    }

    /// The instance evaluated in another scalar type.
    pub fn instance_as<T: Real>(&self) -> Result<Instance<T>> {
        self.document.to_instance()
    }

    pub fn seed(&self) -> Option<u64> {
        self.document.meta.seed
    }
}

impl AsRef<Instance<f64>> for Scenario {
    fn as_ref(&self) -> &Instance<f64> {
        &self.instance
    }
}

pub fn load_scenario(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let document: ScenarioDocument = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    Scenario::from_document(document)
}

pub fn save_scenario(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario.document()).expect("scenario documents always serialize")
}

/// Distance from the base station of a point drawn uniformly over a disk.
pub fn sample_distance<R: Rng>(rng: &mut R, radius: f64) -> f64 {
    radius * rng.gen::<f64>().sqrt()
}

/// Channel gain `l^{-α}`, with the distance floored at `min_distance`.
pub fn path_gain(distance: f64, path_loss: f64, min_distance: f64) -> f64 {
    distance.max(min_distance).powf(-path_loss)
}

fn pick<R: Rng>(rng: &mut R, set: &[f64]) -> f64 {
    set[rng.gen_range(0..set.len())]
}

/// Scatters `n` users uniformly over the cell and draws their heterogeneous
/// parameters. Deterministic in `(params, seed)`.
pub fn generate(params: &GenParams, seed: u64) -> Result<Scenario> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = (0..params.n)
        .map(|_| {
            let distance = sample_distance(&mut rng, params.radius_m);
            let f_m_ghz = pick(&mut rng, &params.f_m_ghz);
            let lambda_e = pick(&mut rng, &params.lambda_e);
            let w = pick(&mut rng, &params.w_choices);
            UserDoc {
                q_mw: params.q_mw,
                g: path_gain(distance, params.path_loss, params.min_distance_m),
                b_kb: params.b_kb,
                d_megacycles: params.d_megacycles,
                f_m_ghz,
                f_c_ghz: params.f_c_ghz,
                gamma_j_per_cycle: params.gamma_j_per_cycle,
                l_j: params.l_j,
                lambda_e,
                w,
                r_bps: params.r_bps,
            }
        })
        .collect();
    let document = ScenarioDocument {
        meta: Meta {
            seed: Some(seed),
            generator: Some(params.clone()),
            version: DOCUMENT_VERSION.to_string(),
            units: Some(default_units()),
        },
        env: EnvDoc { m: params.m, w_hz: params.w_hz, noise_dbm: params.noise_dbm, access_model: params.access_model },
        users,
    };
    Scenario::from_document(document)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game;

    const FIXTURE: &str = r#"{
      "meta": {"seed": null, "generator": null, "version": "hand"},
      "env": {"M": 2, "w_hz": 5e6, "noise_dbm": -100, "access_model": "interference"},
      "users": [
        {"q_mw": 100, "g": 1e-4, "b_kb": 5000, "d_megacycles": 1000, "f_m_ghz": 1.0, "f_c_ghz": 10,
         "gamma_j_per_cycle": 1e-9, "L_j": 0, "lambda_e": 0, "W": 1, "R_bps": 1e8},
        {"q_mw": 200, "g": 1.6e-7, "b_kb": 5000, "d_megacycles": 1000, "f_m_ghz": 0.5, "f_c_ghz": 10,
         "gamma_j_per_cycle": 1e-9, "L_j": 0, "lambda_e": 0.5, "W": 1, "R_bps": 1e8}
      ]
    }"#;

    #[test]
    fn fixture_loads_with_expected_weights() {
        let s = load_scenario(FIXTURE).unwrap();
        let inst = s.instance();
        assert_eq!(inst.channels(), 2);
        assert!((inst.env.noise - 1e-13).abs() < 1e-27);
        let q0 = game::access_weight(&inst.env, &inst.users[0]).get();
        let q1 = game::access_weight(&inst.env, &inst.users[1]).get();
        // 0.1 W * 1e-4 and 0.2 W * 1.6e-7
        assert!((q0 - 1e-5).abs() < 1e-19);
        assert!((q1 - 3.2e-8).abs() < 1e-22);
        assert_eq!(inst.users[1].weight_time, 0.5);
        assert_eq!(inst.users[0].input_bits, 4e7);
        assert_eq!(inst.users[0].cycles, 1e9);
    }

    #[test]
    fn missing_field_names_its_path() {
        let broken = FIXTURE.replace("\"d_megacycles\": 1000, \"f_m_ghz\": 0.5", "\"f_m_ghz\": 0.5");
        match load_scenario(&broken) {
            Err(Error::Schema { path, message }) => {
                assert_eq!(path, "users[1]");
                assert!(message.contains("d_megacycles"), "{message}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_values_are_schema_errors() {
        let broken = FIXTURE.replace("\"lambda_e\": 0.5", "\"lambda_e\": 1.5");
        assert!(matches!(load_scenario(&broken), Err(Error::Schema { path, .. }) if path == "users[1]"));
    }

    #[test]
    fn generated_scenario_round_trips_exactly() {
        let s = generate(&GenParams::default(), 42).unwrap();
        let text = save_scenario(&s);
        let back = load_scenario(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(save_scenario(&back), text);
    }

    #[test]
    fn generation_is_deterministic() {
        let p = GenParams::default();
        assert_eq!(generate(&p, 7).unwrap(), generate(&p, 7).unwrap());
        assert_ne!(generate(&p, 7).unwrap(), generate(&p, 8).unwrap());
    }

    #[test]
    fn gain_follows_path_loss() {
        let p = GenParams { n: 200, ..GenParams::default() };
        let s = generate(&p, 3).unwrap();
        for u in &s.document().users {
            let l = u.g.powf(-1.0 / 4.0);
            assert!((1.0 - 1e-9..=50.0 + 1e-9).contains(&l));
        }
        assert_eq!(path_gain(10.0, 4.0, 1.0), 1e-4);
        assert_eq!(path_gain(0.2, 4.0, 1.0), 1.0);
    }

    #[test]
    fn weights_follow_choice_sets() {
        let p = GenParams { n: 300, lambda_e: vec![0.0], ..GenParams::default() };
        let s = generate(&p, 1).unwrap();
        assert!(s.instance().users.iter().all(|u| u.weight_time == 1.0 && u.weight_energy == 0.0));
        let p = GenParams { n: 300, ..GenParams::default() };
        let s = generate(&p, 1).unwrap();
        for u in &s.document().users {
            assert!([0.5, 0.8, 1.0].contains(&u.f_m_ghz));
            assert!([1.0, 0.5, 0.0].contains(&u.lambda_e));
        }
    }

    #[test]
    fn area_uniform_placement() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let samples = 100_000;
        let mean_sq: f64 = (0..samples).map(|_| sample_distance(&mut rng, 50.0).powi(2)).sum::<f64>() / samples as f64;
        assert!((mean_sq / (2500.0 / 2.0) - 1.0).abs() < 0.02, "{mean_sq}");
    }

    #[test]
    fn bad_params_are_rejected() {
        assert!(generate(&GenParams { radius_m: 0.0, ..GenParams::default() }, 0).is_err());
        assert!(generate(&GenParams { f_m_ghz: vec![], ..GenParams::default() }, 0).is_err());
        assert!(generate(&GenParams { lambda_e: vec![2.0], ..GenParams::default() }, 0).is_err());
    }
}
