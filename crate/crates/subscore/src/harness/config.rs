//! Run configuration: the single serializable source of truth for a whole
//! experiment. Field names mirror the CLI flags.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gp::GammaSearch;
use crate::optim::{OptimizerConfig, ScheduleParams, Strategy, VqeProblem};
use crate::sim::{build_efficient_su2, build_heisenberg, NoiseModel};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    GaussianExact,
    Sampled,
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-exact" | "gaussian" => Ok(NoiseKind::GaussianExact),
            "sampled" => Ok(NoiseKind::Sampled),
            other => Err(Error::InvalidConfig(format!(
                "unknown noise model '{other}' (expected gaussian-exact|sampled)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n_qbits: usize,
    pub n_layers: usize,
    pub circuit: String,
    pub pbc: bool,
    pub kernel: String,
    pub j: [f64; 3],
    pub h: [f64; 3],
    pub readout_strategy: Strategy,
    /// Initial CoRe threshold as a shot count.
    pub corethresh: u64,
    /// Window length for the threshold slope estimate.
    pub corethresh_width: usize,
    /// Per-point shot cap that floors the threshold.
    pub coremin_scale: u64,
    /// Gain between the progress slope and the threshold.
    pub corethresh_scale: f64,
    /// Total shot budget per operator group.
    pub n_iter: u64,
    pub nft_shots: u64,
    pub nft_recal_interval: Option<usize>,
    pub noise: NoiseKind,
    /// Single-shot variance override; calibrated at the start point if unset.
    pub eta2: Option<f64>,
    /// Prior standard deviation override.
    pub sigma0: Option<f64>,
    pub max_gamma: f64,
    pub gamma_steps: usize,
    pub gamma_dense_steps: usize,
    pub gamma_interval: usize,
    pub inducer_trigger: usize,
    pub inducer_keep: usize,
    pub core_grid: usize,
    pub seeds: Vec<u64>,
    pub max_steps: Option<usize>,
    pub quantiles: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_qbits: 5,
            n_layers: 3,
            circuit: "esu2".into(),
            pbc: false,
            kernel: "vqe".into(),
            j: [-1.0, 0.0, 0.0],
            h: [0.0, 0.0, -1.0],
            readout_strategy: Strategy::Center,
            corethresh: 512,
            corethresh_width: 40,
            coremin_scale: 1024,
            corethresh_scale: 1.0,
            n_iter: 3_000_000,
            nft_shots: 1024,
            nft_recal_interval: None,
            noise: NoiseKind::GaussianExact,
            eta2: None,
            sigma0: None,
            max_gamma: 20.0,
            gamma_steps: 90,
            gamma_dense_steps: 0,
            gamma_interval: 20,
            inducer_trigger: 120,
            inducer_keep: 100,
            core_grid: 64,
            seeds: (0..100).collect(),
            max_steps: None,
            quantiles: vec![0.25, 0.5, 0.75],
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.circuit != "esu2" {
            return Err(Error::InvalidConfig(format!(
                "unknown circuit '{}' (only 'esu2' is built in)",
                self.circuit
            )));
        }
        if self.pbc {
            return Err(Error::InvalidConfig(
                "periodic boundary conditions are not supported; only open boundaries".into(),
            ));
        }
        if self.kernel != "vqe" {
            return Err(Error::InvalidConfig(format!(
                "unknown kernel '{}' (only 'vqe' is built in)",
                self.kernel
            )));
        }
        if self.n_qbits < 2 {
            return Err(Error::InvalidConfig("need at least 2 qubits".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("need at least one seed".into()));
        }
        if self.quantiles.is_empty() || self.quantiles.iter().any(|q| !(0.0..=1.0).contains(q)) {
            return Err(Error::InvalidConfig("quantile levels must lie in [0, 1]".into()));
        }
        self.optimizer_config()?.validate()
    }

    pub fn noise_model(&self, eta2: f64) -> NoiseModel {
        match self.noise {
            NoiseKind::GaussianExact => NoiseModel::GaussianExact { eta2 },
            NoiseKind::Sampled => NoiseModel::Sampled { eta2 },
        }
    }

    /// Builds the simulation side. The noise model carries a placeholder
    /// single-shot variance when `eta2` is unset; per-run calibration
    /// replaces it through `OptimizerConfig::eta2_override == None`.
    pub fn problem(&self) -> Result<VqeProblem> {
        let circuit = build_efficient_su2(self.n_qbits, self.n_layers)?;
        let hamiltonian = build_heisenberg(self.n_qbits, self.j, self.h)?;
        let noise = self.noise_model(self.eta2.unwrap_or(1.0));
        VqeProblem::new(circuit, hamiltonian, noise)
    }

    pub fn optimizer_config(&self) -> Result<OptimizerConfig> {
        let cfg = OptimizerConfig {
            strategy: self.readout_strategy,
            schedule: ScheduleParams {
                kappa0_shots: self.corethresh,
                c0_shots: self.coremin_scale,
                c1: self.corethresh_scale,
                t_ave: self.corethresh_width,
            },
            nft_shots: self.nft_shots,
            nft_recal_interval: self.nft_recal_interval,
            gamma_search: GammaSearch {
                min_gamma: f64::sqrt(2.0),
                max_gamma: self.max_gamma,
                steps: self.gamma_steps,
            },
            gamma_dense_steps: self.gamma_dense_steps,
            gamma_interval: self.gamma_interval,
            gamma2_init: 4.0,
            compress_trigger: self.inducer_trigger,
            compress_keep: self.inducer_keep,
            core_grid: self.core_grid,
            budget: self.n_iter,
            max_steps: self.max_steps,
            eta2_override: self.eta2,
            sigma0_override: self.sigma0,
        };
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::parse("config serialization", e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| Error::parse("config file", e.to_string()))?;
        Ok(config)
    }
}
