//! Experiment configuration files and the built-in presets.
//!
//! A configuration is a TOML document with four sections:
//!
//! ```toml
//! [experiment]
//! schemes = ["us-lcrp", "two-step-ref12"]
//! seed = 1
//! trials = 10000        # minimum trials per cell
//! max_trials = 1000000  # cap for adaptive escalation
//! workers = 0           # 0 = every core
//!
//! [network]
//! sizes = [[5, 3]]      # (N, M) pairs
//! broadcast_slots = [6] # values of L
//! layout = "uniform-square"
//! pathloss_exponent = 2.0
//! topology = "fixed"    # or "per-trial"
//!
//! [rate]
//! mode = "fixed"        # or "scaled" (values are multiplexing gains)
//! values = [1.0, 1.5]
//!
//! [sweep]
//! ebn0_db = [0.0, 2.0, 4.0]
//! ```
//!
//! An explicit network may be frozen into the file as a `[network.model]`
//! table (see [`NetworkModel`]); it then replaces the sampled topology.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fading::{Layout, NetworkModel};
use crate::montecarlo::{fixed_topology, RateMode, SweepSpec, TopologySource, TrialBudget};
use crate::protocol::Scheme;
use crate::{Error, Result};

/// Names accepted by [`ExperimentConfig::preset`].
pub const PRESETS: [&str; 4] = ["fig3", "fig4", "fig5", "fig6"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyMode {
    /// One network per `(N, M)`, drawn from the master seed.
    Fixed,
    /// A fresh network for every trial.
    PerTrial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub schemes: Vec<Scheme>,
    pub seed: u64,
    pub trials: u64,
    pub max_trials: u64,
    #[serde(default)]
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(default)]
    pub sizes: Vec<[usize; 2]>,
    pub broadcast_slots: Vec<usize>,
    pub layout: Layout,
    pub pathloss_exponent: f64,
    pub topology: TopologyMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<NetworkModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSection {
    pub mode: RateMode,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub ebn0_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub network: NetworkSection,
    pub rate: RateSection,
    pub sweep: SweepSection,
}

fn grid(start: i32, stop: i32, step: i32) -> Vec<f64> {
    (start..=stop).step_by(step as usize).map(f64::from).collect()
}

impl ExperimentConfig {
    /// One of the built-in setups in [`PRESETS`].
    ///
    /// * `fig3`: `(N, M) ∈ {(2, 1), (3, 2)}`, `L = 6`, `R = 1`.
    /// * `fig4`: `N = 5`, `M = 3`, `L = 6`, `R ∈ {1, 1.5}`.
    /// * `fig5`: `N = 5`, `M = 3`, `L ∈ {6, 12}`, `r ∈ {0.4, 0.5}`.
    /// * `fig6`: as `fig5` with `L = 6`, `r ∈ {0, 0.3, 0.5}`, users clustered
    ///   near the origin, relays near the centre and path-loss exponent 3.5.
    ///
    /// All but `fig6` place nodes uniformly in the unit square with
    /// path-loss exponent 2, and all compare US-LCRP with two-step selection.
    pub fn preset(name: &str) -> Result<Self> {
        let base = ExperimentConfig {
            experiment: ExperimentSection {
                schemes: vec![Scheme::UsLcrp, Scheme::TwoStepRef12],
                seed: 1,
                trials: 10_000,
                max_trials: 1_000_000,
                workers: 0,
            },
            network: NetworkSection {
                sizes: vec![[5, 3]],
                broadcast_slots: vec![6],
                layout: Layout::UniformSquare,
                pathloss_exponent: 2.0,
                topology: TopologyMode::Fixed,
                model: None,
            },
            rate: RateSection { mode: RateMode::Fixed, values: vec![1.0] },
            sweep: SweepSection { ebn0_db: grid(-4, 14, 2) },
        };
        let mut c = base;
        match name {
            "fig3" => {
                c.network.sizes = vec![[2, 1], [3, 2]];
                c.sweep.ebn0_db = grid(-4, 16, 2);
            }
            "fig4" => {
                c.rate.values = vec![1.0, 1.5];
            }
            "fig5" => {
                c.network.broadcast_slots = vec![6, 12];
                c.rate = RateSection { mode: RateMode::Scaled, values: vec![0.4, 0.5] };
                c.sweep.ebn0_db = grid(0, 30, 5);
            }
            "fig6" => {
                c.network.layout = Layout::Clustered;
                c.network.pathloss_exponent = 3.5;
                c.rate = RateSection { mode: RateMode::Scaled, values: vec![0.0, 0.3, 0.5] };
                c.sweep.ebn0_db = grid(0, 30, 5);
            }
            other => {
                return Err(Error::config(
                    "preset",
                    format!("unknown preset `{other}`, expected one of {}", PRESETS.join(", ")),
                ))
            }
        }
        Ok(c)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Checks every field, naming the first offending one.
    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.schemes.is_empty() {
            return Err(Error::config("experiment.schemes", "at least one scheme is required"));
        }
        if (1..e.schemes.len()).any(|i| e.schemes[..i].contains(&e.schemes[i])) {
            return Err(Error::config("experiment.schemes", "schemes must not repeat"));
        }
        if e.trials == 0 {
            return Err(Error::config("experiment.trials", "must be at least 1"));
        }
        if e.max_trials < e.trials {
            return Err(Error::config("experiment.max_trials", "must not be below trials"));
        }

        let n = &self.network;
        match &n.model {
            Some(model) => {
                let size = [model.n_users(), model.n_relays()];
                if !(n.sizes.is_empty() || n.sizes == [size]) {
                    return Err(Error::config(
                        "network.sizes",
                        format!("must be empty or [[{}, {}]] when a model is given", size[0], size[1]),
                    ));
                }
                if n.topology == TopologyMode::PerTrial {
                    return Err(Error::config("network.topology", "an explicit model is fixed"));
                }
            }
            None => {
                if n.sizes.is_empty() {
                    return Err(Error::config("network.sizes", "at least one (N, M) pair is required"));
                }
                if n.sizes.iter().any(|&[users, relays]| users == 0 || relays == 0) {
                    return Err(Error::config("network.sizes", "N and M must be at least 1"));
                }
            }
        }
        if n.broadcast_slots.is_empty() || n.broadcast_slots.contains(&0) {
            return Err(Error::config("network.broadcast_slots", "values must be at least 1"));
        }
        if !(n.pathloss_exponent.is_finite() && n.pathloss_exponent > 0.0) {
            return Err(Error::config("network.pathloss_exponent", "must be positive"));
        }

        if self.rate.values.is_empty() {
            return Err(Error::config("rate.values", "at least one value is required"));
        }
        if self.sweep.ebn0_db.is_empty() {
            return Err(Error::config("sweep.ebn0_db", "at least one point is required"));
        }
        for spec in self.sweep_specs_unchecked(false)? {
            spec.validate()?;
        }
        Ok(())
    }

    /// `(N, M)` pairs the experiment covers.
    pub fn sizes(&self) -> Vec<(usize, usize)> {
        match &self.network.model {
            Some(model) => vec![(model.n_users(), model.n_relays())],
            None => self.network.sizes.iter().map(|&[n, m]| (n, m)).collect(),
        }
    }

    /// The network source every cell with `N` users and `M` relays uses.
    pub fn topology(&self, n_users: usize, n_relays: usize) -> Result<TopologySource> {
        let n = &self.network;
        if let Some(model) = &n.model {
            return Ok(TopologySource::Fixed(model.clone()));
        }
        Ok(match n.topology {
            TopologyMode::Fixed => TopologySource::Fixed(fixed_topology(
                self.experiment.seed,
                n_users,
                n_relays,
                n.layout,
                n.pathloss_exponent,
            )?),
            TopologyMode::PerTrial => TopologySource::PerTrial {
                n_users,
                n_relays,
                layout: n.layout,
                pathloss_exponent: n.pathloss_exponent,
            },
        })
    }

    pub fn budget(&self) -> TrialBudget {
        TrialBudget::adaptive(self.experiment.trials, self.experiment.max_trials)
    }

    fn sweep_specs_unchecked(&self, sample: bool) -> Result<Vec<SweepSpec>> {
        let mut specs = Vec::new();
        for (n_users, n_relays) in self.sizes() {
            let topology = if sample {
                self.topology(n_users, n_relays)?
            } else {
                TopologySource::PerTrial {
                    n_users,
                    n_relays,
                    layout: self.network.layout,
                    pathloss_exponent: self.network.pathloss_exponent,
                }
            };
            for &l in &self.network.broadcast_slots {
                specs.push(SweepSpec {
                    schemes: self.experiment.schemes.clone(),
                    n_broadcast_slots: l,
                    topology: topology.clone(),
                    snr_points_db: self.sweep.ebn0_db.clone(),
                    rate_mode: self.rate.mode,
                    rate_values: self.rate.values.clone(),
                    budget: self.budget(),
                    seed: self.experiment.seed,
                    workers: self.experiment.workers,
                });
            }
        }
        Ok(specs)
    }

    /// One sweep per `(N, M, L)`, sizes outermost.
    pub fn sweep_specs(&self) -> Result<Vec<SweepSpec>> {
        self.validate()?;
        self.sweep_specs_unchecked(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_expand_to_their_setups() {
        let fig4 = ExperimentConfig::preset("fig4").unwrap();
        assert_eq!(fig4.sizes(), vec![(5, 3)]);
        assert_eq!(fig4.network.broadcast_slots, vec![6]);
        assert_eq!(fig4.rate.mode, RateMode::Fixed);
        assert_eq!(fig4.rate.values, vec![1.0, 1.5]);
        assert_eq!(fig4.network.layout, Layout::UniformSquare);
        assert_eq!(fig4.network.pathloss_exponent, 2.0);

        let fig6 = ExperimentConfig::preset("fig6").unwrap();
        assert_eq!(fig6.network.layout, Layout::Clustered);
        assert_eq!(fig6.network.pathloss_exponent, 3.5);
        assert_eq!(fig6.network.broadcast_slots, vec![6]);
        assert_eq!(fig6.rate.mode, RateMode::Scaled);

        let fig3 = ExperimentConfig::preset("fig3").unwrap();
        assert_eq!(fig3.sizes(), vec![(2, 1), (3, 2)]);
        assert_eq!(fig3.rate.values, vec![1.0]);

        let fig5 = ExperimentConfig::preset("fig5").unwrap();
        assert_eq!(fig5.network.broadcast_slots, vec![6, 12]);
        assert_eq!(fig5.rate.values, vec![0.4, 0.5]);

        for name in PRESETS {
            ExperimentConfig::preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn unknown_preset_names_the_field() {
        let err = ExperimentConfig::preset("fig9").unwrap_err();
        assert!(err.to_string().contains("`preset`"), "{err}");
    }

    #[test]
    fn presets_round_trip_through_toml() {
        for name in PRESETS {
            let config = ExperimentConfig::preset(name).unwrap();
            let text = config.to_toml().unwrap();
            let back = ExperimentConfig::from_toml(&text).unwrap();
            assert_eq!(back, config);
            assert_eq!(back.to_toml().unwrap(), text);
        }
    }

    #[test]
    fn embedded_model_round_trips() {
        let mut config = ExperimentConfig::preset("fig4").unwrap();
        config.network.model = Some(fixed_topology(3, 5, 3, Layout::UniformSquare, 2.0).unwrap());
        config.network.sizes.clear();
        let text = config.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), config);
    }

    #[test]
    fn invalid_values_name_their_field() {
        let cases: [(&str, fn(&mut ExperimentConfig)); 8] = [
            ("experiment.schemes", |c| c.experiment.schemes.clear()),
            ("experiment.trials", |c| c.experiment.trials = 0),
            ("experiment.max_trials", |c| c.experiment.max_trials = 1),
            ("network.sizes", |c| c.network.sizes = vec![[0, 3]]),
            ("network.broadcast_slots", |c| c.network.broadcast_slots = vec![0]),
            ("network.pathloss_exponent", |c| c.network.pathloss_exponent = -1.0),
            ("sweep.ebn0_db", |c| c.sweep.ebn0_db = vec![3.0, 1.0]),
            ("rate.values", |c| {
                c.rate.mode = RateMode::Scaled;
                c.rate.values = vec![1.5];
            }),
        ];
        for (field, mutate) in cases {
            let mut config = ExperimentConfig::preset("fig4").unwrap();
            mutate(&mut config);
            let err = config.validate().unwrap_err();
            assert!(err.to_string().contains(&format!("`{field}`")), "{field}: {err}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = ExperimentConfig::preset("fig4").unwrap().to_toml().unwrap();
        text = text.replace("seed = 1", "seed = 1\nsede = 2");
        let err = ExperimentConfig::from_toml(&text).unwrap_err();
        assert!(err.to_string().contains("sede"), "{err}");
    }

    #[test]
    fn specs_follow_sizes_then_slots() {
        let specs = ExperimentConfig::preset("fig5").unwrap().sweep_specs().unwrap();
        let shape: Vec<_> = specs
            .iter()
            .map(|s| (s.topology.n_users(), s.topology.n_relays(), s.n_broadcast_slots))
            .collect();
        assert_eq!(shape, vec![(5, 3, 6), (5, 3, 12)]);
        assert!(matches!(specs[0].topology, TopologySource::Fixed(_)));
        assert_eq!(specs[0].topology, specs[1].topology);
    }
}
