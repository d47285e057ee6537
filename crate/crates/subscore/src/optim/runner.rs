//! The optimization loops and their trace bookkeeping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::schedule::{update_threshold, ScheduleParams};
use super::shots::{choose_shots_bound, choose_shots_center, ShotAllocation};
use crate::error::Error;
use crate::gp::{
    compress, equidistant_line_points, fit_trig_1d, loo_gamma_search, minimize_trig_1d, Dataset,
    GPModel, GammaSearch, KernelParams, DEFAULT_CORE_GRID,
};
use crate::sim::{
    estimate_single_shot_variance, exact_energy, fidelity, ground_truth, observe, prepare_state,
    Hamiltonian, NoiseModel, ParamCircuit,
};
use crate::Result;

/// Axis value recorded for the initial observation row, which precedes any
/// axis sweep.
pub const INIT_STEP_AXIS: i64 = -1;

/// Which optimizer drives the run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Adaptive allocation with a separately relaxed center point.
    Center,
    /// Adaptive allocation pricing every point at the threshold.
    Bound,
    /// Fixed-shot NFT coordinate descent.
    Nft,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Center => "center",
            Strategy::Bound => "bound",
            Strategy::Nft => "nft",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center" => Ok(Strategy::Center),
            "bound" => Ok(Strategy::Bound),
            "nft" => Ok(Strategy::Nft),
            other => Err(Error::InvalidConfig(format!(
                "unknown readout strategy '{other}' (expected center|bound|nft)"
            ))),
        }
    }
}

/// Everything an optimizer needs to evaluate the objective: the ansatz, the
/// Hamiltonian, the noise channel, and the exact ground truth for metrics.
pub struct VqeProblem {
    pub circuit: ParamCircuit,
    pub hamiltonian: Hamiltonian,
    pub noise: NoiseModel,
    ground_energy: f64,
    ground_state: crate::sim::QuantumState,
}

impl VqeProblem {
    pub fn new(circuit: ParamCircuit, hamiltonian: Hamiltonian, noise: NoiseModel) -> Result<Self> {
        if circuit.num_qubits() != hamiltonian.num_qubits() {
            return Err(Error::InvalidConfig(format!(
                "circuit acts on {} qubits but the Hamiltonian has {}",
                circuit.num_qubits(),
                hamiltonian.num_qubits()
            )));
        }
        let (ground_energy, ground_state) = ground_truth(&hamiltonian)?;
        Ok(Self {
            circuit,
            hamiltonian,
            noise,
            ground_energy,
            ground_state,
        })
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    pub fn dims(&self) -> usize {
        self.circuit.num_params()
    }

    /// Observation through a caller-supplied noise model (the runs calibrate
    /// `eta^2` per trial and must draw with the same value they budget with).
    pub fn observe_with(
        &self,
        noise: &NoiseModel,
        angles: &[f64],
        shots: u64,
        rng: &mut impl Rng,
    ) -> Result<(f64, f64)> {
        observe(&self.circuit, &self.hamiltonian, angles, shots, noise, rng)
    }

    pub fn observe(&self, angles: &[f64], shots: u64, rng: &mut impl Rng) -> Result<(f64, f64)> {
        self.observe_with(&self.noise.clone(), angles, shots, rng)
    }

    /// Exact objective value (no noise).
    pub fn true_value(&self, angles: &[f64]) -> f64 {
        exact_energy(&self.hamiltonian, &prepare_state(&self.circuit, angles))
    }

    pub fn delta_energy(&self, angles: &[f64]) -> f64 {
        self.true_value(angles) - self.ground_energy
    }

    pub fn delta_fidelity(&self, angles: &[f64]) -> f64 {
        1.0 - fidelity(&self.ground_state, &prepare_state(&self.circuit, angles))
    }

    /// Single-shot variance at a point, used to calibrate `eta^2` once per run.
    pub fn single_shot_variance(&self, angles: &[f64]) -> f64 {
        estimate_single_shot_variance(&self.hamiltonian, &prepare_state(&self.circuit, angles))
    }
}

/// Per-run optimizer settings beyond the problem definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub strategy: Strategy,
    pub schedule: ScheduleParams,
    /// Shots per observation for the NFT baseline.
    pub nft_shots: u64,
    /// NFT re-measures its carried best score every this many steps;
    /// `None` means once per full axis sweep.
    pub nft_recal_interval: Option<usize>,
    pub gamma_search: GammaSearch,
    /// Gamma is re-fit every step for the first `gamma_dense_steps` steps,
    /// then every `gamma_interval` steps. Leave the dense phase at zero:
    /// leave-one-out fits on the first handful of observations are noise in
    /// a 40-dimensional space and measurably hurt the optimizer.
    pub gamma_dense_steps: usize,
    pub gamma_interval: usize,
    /// Initial gamma^2 before the first search.
    pub gamma2_init: f64,
    /// Training-set compression thresholds.
    pub compress_trigger: usize,
    pub compress_keep: usize,
    /// Test angles per CoRe line check.
    pub core_grid: usize,
    /// Stop once this many cumulative shots (per operator group) are spent.
    pub budget: u64,
    /// Optional hard cap on optimization steps (diagnostics and audits).
    pub max_steps: Option<usize>,
    /// Fixed single-shot variance; `None` calibrates it at the start point.
    pub eta2_override: Option<f64>,
    /// Fixed prior standard deviation; `None` derives it from a rough energy
    /// scale at the start point.
    pub sigma0_override: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Center,
            schedule: ScheduleParams::default(),
            nft_shots: 1024,
            nft_recal_interval: None,
            gamma_search: GammaSearch::default(),
            gamma_dense_steps: 0,
            gamma_interval: 20,
            gamma2_init: 4.0,
            compress_trigger: 120,
            compress_keep: 100,
            core_grid: DEFAULT_CORE_GRID,
            budget: 3_000_000,
            max_steps: None,
            eta2_override: None,
            sigma0_override: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.budget == 0 {
            return Err(Error::InvalidConfig("shot budget must be positive".into()));
        }
        if self.nft_shots == 0 {
            return Err(Error::InvalidConfig("NFT needs at least one shot per observation".into()));
        }
        if self.compress_keep == 0 || self.compress_trigger < self.compress_keep {
            return Err(Error::InvalidConfig(
                "compression thresholds must satisfy trigger >= keep >= 1".into(),
            ));
        }
        if let Some(eta2) = self.eta2_override {
            if !(eta2 > 0.0) || !eta2.is_finite() {
                return Err(Error::InvalidConfig(format!("eta^2 override must be positive, got {eta2}")));
            }
        }
        Ok(())
    }
}

/// One trace row. `kappa` is the threshold (standard deviation) in force
/// during the step; NFT rows record 0 there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub axis: i64,
    pub shots_step: u64,
    pub cum_shots: u64,
    pub kappa: f64,
    pub y_hat: f64,
    pub delta_energy: f64,
    pub delta_fidelity: f64,
}

/// Full per-seed record of one optimizer run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub seed: u64,
    pub strategy: Strategy,
    pub eta2: f64,
    pub sigma0_2: f64,
    pub steps: Vec<TraceStep>,
    pub final_point: Vec<f64>,
}

impl OptimizerTrace {
    pub fn final_delta_energy(&self) -> f64 {
        self.steps.last().map_or(f64::INFINITY, |s| s.delta_energy)
    }

    /// Smallest delta-energy attained within the shot budget `checkpoint`.
    pub fn best_delta_energy_by(&self, checkpoint: u64) -> Option<f64> {
        self.steps
            .iter()
            .take_while(|s| s.cum_shots <= checkpoint)
            .map(|s| s.delta_energy)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }
}

/// Starting point shared by all strategies at equal seeds.
fn initial_point(seed: u64, dims: usize) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(0);
    (0..dims).map(|_| rng.random_range(0.0..TAU)).collect()
}

fn observation_rng(seed: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn wrap(theta: f64) -> f64 {
    theta.rem_euclid(TAU)
}

/// Shared mutable state while a run is in flight.
struct RunCore<'a> {
    problem: &'a VqeProblem,
    cfg: &'a OptimizerConfig,
    rng: ChaCha12Rng,
    /// Noise model carrying the per-trial calibrated single-shot variance.
    noise: NoiseModel,
    eta2: f64,
    t: usize,
    axis: usize,
    best_point: Vec<f64>,
    best_value: f64,
    history: Vec<f64>,
    cum_shots: u64,
    trace: Vec<TraceStep>,
}

impl<'a> RunCore<'a> {
    fn observe(&mut self, angles: &[f64], shots: u64) -> Result<(f64, f64)> {
        self.problem.observe_with(&self.noise, angles, shots, &mut self.rng)
    }

    fn record(&mut self, axis: i64, shots_step: u64, kappa: f64) {
        let delta_energy = self.problem.delta_energy(&self.best_point);
        let delta_fidelity = self.problem.delta_fidelity(&self.best_point);
        debug_assert!(delta_energy >= -1e-9, "variational bound violated: {delta_energy}");
        debug_assert!((-1e-12..=1.0).contains(&delta_fidelity));
        self.trace.push(TraceStep {
            step: self.t,
            axis,
            shots_step,
            cum_shots: self.cum_shots,
            kappa,
            y_hat: self.best_value,
            delta_energy,
            delta_fidelity,
        });
    }

    fn finished(&self) -> bool {
        if self.cum_shots >= self.cfg.budget {
            return true;
        }
        match self.cfg.max_steps {
            Some(cap) => self.t >= cap,
            None => false,
        }
    }

    fn advance_axis(&mut self) {
        self.t += 1;
        self.axis = (self.axis + 1) % self.problem.dims();
    }
}

/// Driver for the adaptive strategies (center and bound).
pub struct SubscoreRun<'a> {
    core: RunCore<'a>,
    data: Dataset,
    params: KernelParams,
    gp: GPModel,
    kappa2: f64,
}

impl<'a> SubscoreRun<'a> {
    pub fn new(problem: &'a VqeProblem, cfg: &'a OptimizerConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        assert!(matches!(cfg.strategy, Strategy::Center | Strategy::Bound));
        let dims = problem.dims();
        let best_point = initial_point(seed, dims);
        let mut rng = observation_rng(seed);

        let eta2 = match cfg.eta2_override {
            Some(eta2) => eta2,
            None => problem.single_shot_variance(&best_point).max(1e-12),
        };
        let noise = problem.noise.with_eta2(eta2)?;
        let sigma0 = match cfg.sigma0_override {
            Some(s) => s,
            None => {
                let rough = problem.true_value(&best_point).abs();
                rough.max(problem.hamiltonian.coefficient_l1() / 4.0)
            }
        };
        let params = KernelParams::new(
            cfg.gamma2_init,
            (sigma0 * sigma0).max(1e-12),
            problem.circuit.multiplicities().to_vec(),
        );

        // First observation at the start point with noise kappa_0^2.
        let kappa2 = cfg.schedule.initial_kappa2(eta2);
        let init_shots = (eta2 / kappa2).ceil().max(1.0) as u64;
        let (y0, var0) = problem.observe_with(&noise, &best_point, init_shots, &mut rng)?;
        let mut data = Dataset::new();
        data.push(&best_point, y0, var0);
        let gp = GPModel::fit(data.clone(), params.clone())?;

        let mut core = RunCore {
            problem,
            cfg,
            rng,
            noise,
            eta2,
            t: 0,
            axis: 0,
            best_point,
            best_value: y0,
            history: vec![y0],
            cum_shots: init_shots,
            trace: Vec::new(),
        };
        core.record(INIT_STEP_AXIS, init_shots, kappa2.sqrt());
        Ok(Self {
            core,
            data,
            params,
            gp,
            kappa2,
        })
    }

    pub fn finished(&self) -> bool {
        self.core.finished()
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    pub fn eta2(&self) -> f64 {
        self.core.eta2
    }

    pub fn gp(&self) -> &GPModel {
        &self.gp
    }

    pub fn best_point(&self) -> &[f64] {
        &self.core.best_point
    }

    pub fn cum_shots(&self) -> u64 {
        self.core.cum_shots
    }

    pub fn current_axis(&self) -> usize {
        self.core.axis
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.core.trace
    }

    /// The allocation the current state implies, without executing it.
    pub fn peek_allocation(&self) -> Result<ShotAllocation> {
        let axis = self.core.axis;
        match self.core.cfg.strategy {
            Strategy::Bound => Ok(choose_shots_bound(
                &self.core.best_point,
                axis,
                self.kappa2,
                self.core.eta2,
                self.params.multiplicities[axis],
            )),
            Strategy::Center => choose_shots_center(
                &self.gp,
                &self.core.best_point,
                axis,
                self.kappa2,
                self.core.eta2,
                self.core.cfg.core_grid,
            ),
            Strategy::Nft => unreachable!("NFT does not allocate adaptively"),
        }
    }

    /// What the bound variant would spend on the identical state; used by
    /// allocation-economy audits.
    pub fn peek_bound_allocation(&self) -> ShotAllocation {
        let axis = self.core.axis;
        choose_shots_bound(
            &self.core.best_point,
            axis,
            self.kappa2,
            self.core.eta2,
            self.params.multiplicities[axis],
        )
    }

    /// One SMO step: refresh hyperparameters on schedule, compress the
    /// training set, allocate and spend shots on the equidistant line points,
    /// refit, minimize the posterior mean along the line, and update the
    /// threshold from the recent best-value slope.
    pub fn step(&mut self) -> Result<()> {
        let cfg = self.core.cfg;
        let step_index = self.core.t + 1;

        // Hyperparameter refresh before any feasibility math so that the
        // post-step CoRe audit sees the same kernel the allocation used.
        let due = step_index <= cfg.gamma_dense_steps || step_index % cfg.gamma_interval == 0;
        let mut refit_needed = false;
        if due && self.data.len() >= 3 {
            let gamma2 = loo_gamma_search(&self.data, &self.params, &cfg.gamma_search)?;
            if gamma2 != self.params.gamma2 {
                self.params = KernelParams::new(gamma2, self.params.sigma0_2, self.params.multiplicities.clone());
                refit_needed = true;
            }
        }
        if self.data.len() > cfg.compress_trigger {
            self.data = compress(&self.data, &self.params, cfg.compress_trigger, cfg.compress_keep)?;
            refit_needed = true;
        }
        if refit_needed {
            self.gp = GPModel::fit(self.data.clone(), self.params.clone())?;
        }

        let axis = self.core.axis;
        let allocation = self.peek_allocation()?;
        let mut spent = 0u64;
        for (point, &shots) in allocation.points.iter().zip(&allocation.shots) {
            if shots == 0 {
                continue;
            }
            let (y, var) = self.core.observe(point, shots)?;
            self.data.push(point, y, var);
            spent += shots;
        }
        self.gp = GPModel::fit(self.data.clone(), self.params.clone())?;

        let center = self.core.best_point.clone();
        let (minimizer, value) = self.gp.minimize_on_line(&center, axis);
        self.core.best_point = minimizer;
        self.core.best_value = value;
        self.core.cum_shots += spent;
        self.core.history.push(value);

        let kappa_used = self.kappa2;
        self.kappa2 = update_threshold(&self.core.history, self.kappa2, &cfg.schedule, self.core.eta2);

        self.core.advance_axis();
        self.core.record(axis as i64, spent, kappa_used.sqrt());
        Ok(())
    }

    fn into_trace(self, seed: u64) -> OptimizerTrace {
        OptimizerTrace {
            seed,
            strategy: self.core.cfg.strategy,
            eta2: self.core.eta2,
            sigma0_2: self.params.sigma0_2,
            steps: self.core.trace,
            final_point: self.core.best_point,
        }
    }
}

/// Driver for the fixed-shot NFT baseline.
pub struct NftRun<'a> {
    core: RunCore<'a>,
}

impl<'a> NftRun<'a> {
    pub fn new(problem: &'a VqeProblem, cfg: &'a OptimizerConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let best_point = initial_point(seed, problem.dims());
        let mut rng = observation_rng(seed);
        let eta2 = match cfg.eta2_override {
            Some(eta2) => eta2,
            None => problem.single_shot_variance(&best_point).max(1e-12),
        };
        let noise = problem.noise.with_eta2(eta2)?;
        let (y0, _) = problem.observe_with(&noise, &best_point, cfg.nft_shots, &mut rng)?;
        let mut core = RunCore {
            problem,
            cfg,
            rng,
            noise,
            eta2,
            t: 0,
            axis: 0,
            best_point,
            best_value: y0,
            history: vec![y0],
            cum_shots: cfg.nft_shots,
            trace: Vec::new(),
        };
        core.record(INIT_STEP_AXIS, cfg.nft_shots, 0.0);
        Ok(Self { core })
    }

    pub fn finished(&self) -> bool {
        self.core.finished()
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.core.trace
    }

    pub fn best_point(&self) -> &[f64] {
        &self.core.best_point
    }

    /// One NFT step: observe the two `2*pi/3` shifts with the fixed shot
    /// count, interpolate the order-1 restriction through them plus the
    /// carried best score, jump to its analytic minimum, and periodically
    /// re-measure the carried score to stop drift.
    pub fn step(&mut self) -> Result<()> {
        let cfg = self.core.cfg;
        let axis = self.core.axis;
        let order = self.core.problem.circuit.multiplicity(axis);
        let nodes = equidistant_line_points(&self.core.best_point, axis, order);
        let count = nodes.len();
        let mut angles = vec![0.0];
        let mut values = vec![self.core.best_value];
        let mut spent = 0u64;
        for (w, point) in nodes.iter().enumerate().skip(1) {
            let (y, _) = self.core.observe(point, cfg.nft_shots)?;
            angles.push(TAU * w as f64 / count as f64);
            values.push(y);
            spent += cfg.nft_shots;
        }
        let poly = fit_trig_1d(&angles, &values, None, order)?;
        let (theta, value) = minimize_trig_1d(&poly);
        self.core.best_point[axis] = wrap(self.core.best_point[axis] + theta);
        self.core.best_value = value;

        let recal_interval = cfg.nft_recal_interval.unwrap_or(self.core.problem.dims()).max(1);
        let step_index = self.core.t + 1;
        if step_index % recal_interval == 0 {
            let point = self.core.best_point.clone();
            let (fresh, _) = self.core.observe(&point, cfg.nft_shots)?;
            self.core.best_value = fresh;
            spent += cfg.nft_shots;
        }

        self.core.cum_shots += spent;
        self.core.history.push(self.core.best_value);
        self.core.advance_axis();
        self.core.record(axis as i64, spent, 0.0);
        Ok(())
    }

    fn into_trace(self, seed: u64) -> OptimizerTrace {
        OptimizerTrace {
            seed,
            strategy: Strategy::Nft,
            eta2: self.core.eta2,
            sigma0_2: 0.0,
            steps: self.core.trace,
            final_point: self.core.best_point,
        }
    }
}

/// Runs one seeded trial to its budget (or step cap) and returns the trace.
pub fn run(problem: &VqeProblem, cfg: &OptimizerConfig, seed: u64) -> Result<OptimizerTrace> {
    cfg.validate()?;
    match cfg.strategy {
        Strategy::Nft => {
            let mut driver = NftRun::new(problem, cfg, seed)?;
            while !driver.finished() {
                driver.step()?;
            }
            Ok(driver.into_trace(seed))
        }
        Strategy::Center | Strategy::Bound => {
            let mut driver = SubscoreRun::new(problem, cfg, seed)?;
            while !driver.finished() {
                driver.step()?;
            }
            Ok(driver.into_trace(seed))
        }
    }
}
