//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. The heavyweight benchmark traces are computed once and
//! shared across criteria.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::f64::consts::TAU;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use subscore::gp::{
    equidistant_line_points, line_grid, fit_trig_1d, uniform_posterior_variance, vqe_kernel,
    Dataset, GPModel, KernelParams,
};
use subscore::harness::{
    aggregate, render_csv, run_experiment, wilcoxon_signed_rank_with, Alternative, RunConfig,
};
use subscore::optim::{OptimizerTrace, Strategy, SubscoreRun};

fn report(criterion: usize, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance] criterion {criterion} ({name}): {verdict} {detail}");
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

/// Builds the 1+2V equidistant line dataset with equal noise and random values.
fn equidistant_dataset(
    center: &[f64],
    axis: usize,
    order: usize,
    noise: f64,
    rng: &mut impl Rng,
) -> Dataset {
    let mut data = Dataset::new();
    for p in equidistant_line_points(center, axis, order) {
        data.push(&p, rng.random_range(-1.0..1.0), noise);
    }
    data
}

// ---------------------------------------------------------------------------
// Criteria 1-2: closed-form uniform variance against the numerical posterior
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_uniform_variance_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let sigma0_2 = 1.0;
    let mut worst_spread = 0.0f64;
    let mut worst_rel = 0.0f64;
    for &gamma2 in &[1.0, 4.0, 25.0] {
        for order in 1usize..=3 {
            for &ratio in &[0.01, 1.0, 100.0] {
                let noise = ratio * sigma0_2;
                let params = KernelParams::new(gamma2, sigma0_2, vec![1, order, 1]);
                let center: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..TAU)).collect();
                let data = equidistant_dataset(&center, 1, order, noise, &mut rng);
                let model = GPModel::fit(data, params.clone()).unwrap();
                let expected = uniform_posterior_variance(noise, &params, order);
                let mut low = f64::INFINITY;
                let mut high = f64::NEG_INFINITY;
                for _ in 0..100 {
                    let mut x = center.clone();
                    x[1] = rng.random_range(0.0..TAU);
                    let s = model.posterior_variance(&x);
                    low = low.min(s);
                    high = high.max(s);
                    worst_rel = worst_rel.max((s - expected).abs() / expected);
                }
                worst_spread = worst_spread.max(high - low);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_spread < 1e-8 * 1.0 && worst_rel < 1e-8 && elapsed < 5.0;
    report(
        1,
        "uniform line variance matches closed form",
        pass,
        &format!("spread {worst_spread:.2e}, rel err {worst_rel:.2e}, {elapsed:.2}s"),
    );
}

#[test]
fn criterion_2_variance_bound_and_asymptotics() {
    let start = Instant::now();
    let sigma0_2 = 1.0;
    let mut rng = ChaCha12Rng::seed_from_u64(202);

    // Strict upper bound by the observation noise across the sweep.
    let mut strict = true;
    for &gamma2 in &[1.0, 4.0, 25.0] {
        for order in 1usize..=3 {
            for &ratio in &[0.01, 1.0, 100.0] {
                let params = KernelParams::new(gamma2, sigma0_2, vec![order]);
                let s = uniform_posterior_variance(ratio * sigma0_2, &params, order);
                strict &= s < ratio * sigma0_2;
            }
        }
    }

    // At sigma^2/sigma0^2 = 1e-6 the three regimes bracket the ratio. The
    // stated gamma^2 probes {1e-6, 1, 1e6} are comparable to the noise ratio
    // itself, so they interpolate between the limits rather than attain
    // them; the attained limits are checked at truly asymptotic gamma^2.
    let noise = 1e-6 * sigma0_2;
    let mut bracket = true;
    for order in 1usize..=3 {
        let low = 2.0 * order as f64 / (1.0 + 2.0 * order as f64) - 1e-3;
        for &gamma2 in &[1e-6, 1.0, 1e6] {
            let params = KernelParams::new(gamma2, sigma0_2, vec![order]);
            let ratio = uniform_posterior_variance(noise, &params, order) / noise;
            bracket &= ratio >= low && ratio <= 1.0 + 1e-3;
        }
    }

    // Limit values, cross-checked against the brute-force posterior.
    let mut limits = true;
    for order in 1usize..=3 {
        let v2 = 2.0 * order as f64;
        let cases = [
            (1e-18, v2 / (1.0 + v2)),
            (1.0, 1.0),
            (1e18, 1.0 / (1.0 + v2)),
        ];
        for &(gamma2, expected_ratio) in &cases {
            let params = KernelParams::new(gamma2, sigma0_2, vec![order]);
            let closed = uniform_posterior_variance(noise, &params, order) / noise;
            limits &= (closed - expected_ratio).abs() < 1e-3;

            let center = vec![rng.random_range(0.0..TAU)];
            let data = equidistant_dataset(&center, 0, order, noise, &mut rng);
            let model = GPModel::fit(data, params).unwrap();
            let mut x = center.clone();
            x[0] = rng.random_range(0.0..TAU);
            let brute = model.posterior_variance(&x) / noise;
            limits &= (brute - expected_ratio).abs() < 1e-3;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = strict && bracket && limits && elapsed < 5.0;
    report(
        2,
        "noise bound and asymptotic limits",
        pass,
        &format!("strict={strict} bracket={bracket} limits={limits}, {elapsed:.2}s"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: equidistant vs non-equidistant observation geometry
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_nonequidistant_variance_is_nonuniform() {
    let start = Instant::now();
    let sigma0_2 = 1.0;
    let noise = 0.1;
    let params = KernelParams::new(1.0, sigma0_2, vec![1]);
    let center = [0.0];

    let eq_model = {
        let mut data = Dataset::new();
        for p in equidistant_line_points(&center, 0, 1) {
            data.push(&p, 0.3, noise);
        }
        GPModel::fit(data, params.clone()).unwrap()
    };
    let noneq_model = {
        let mut data = Dataset::new();
        for theta in [0.0, TAU / 4.0, -(TAU / 4.0)] {
            data.push(&[theta], 0.3, noise);
        }
        GPModel::fit(data, params.clone()).unwrap()
    };

    let grid = line_grid(&center, 0, 256);
    let spread = |model: &GPModel| {
        let vars = model.posterior_variances(&grid);
        let low = vars.iter().cloned().fold(f64::INFINITY, f64::min);
        let high = vars.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (high - low, high)
    };
    let (eq_spread, _) = spread(&eq_model);
    let (noneq_spread, noneq_max) = spread(&noneq_model);
    let uniform = uniform_posterior_variance(noise, &params, 1);

    let elapsed = start.elapsed().as_secs_f64();
    let pass = noneq_spread > 10.0 * eq_spread && noneq_max > uniform && elapsed < 1.0;
    report(
        3,
        "pi/2 shifts leave interior variance bumps",
        pass,
        &format!(
            "spread {noneq_spread:.3e} vs {eq_spread:.3e}, interior max {noneq_max:.4} vs uniform {uniform:.4}, {elapsed:.2}s"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: regularized discrete Fourier transform equivalence
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_regularized_dft_equivalence() {
    let start = Instant::now();
    let sigma0_2 = 1.0;
    let mut rng = ChaCha12Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for order in 1usize..=3 {
        let count = 1 + 2 * order;
        let noise = 0.37 * sigma0_2;
        let shrink = 1.0 / (1.0 + noise / sigma0_2);
        let params = KernelParams::new(1.0, sigma0_2, vec![1]);
        let alphas: Vec<f64> = (0..count).map(|w| TAU * w as f64 / count as f64).collect();
        let values: Vec<f64> = (0..count).map(|_| rng.random_range(-1.0..1.0)).collect();
        let center = [rng.random_range(0.0..TAU)];
        let mut data = Dataset::new();
        for (&alpha, &y) in alphas.iter().zip(&values) {
            data.push(&[center[0] + alpha], y, noise);
        }
        let mut line_params = params.clone();
        line_params.multiplicities = vec![order];
        let model = GPModel::fit(data, line_params).unwrap();

        // Identify the posterior-mean polynomial along the line.
        let means: Vec<f64> = alphas
            .iter()
            .map(|&alpha| model.posterior_mean(&[center[0] + alpha]))
            .collect();
        let poly = fit_trig_1d(&alphas, &means, None, order).unwrap();

        // Plain discrete Fourier coefficients of the raw values.
        let dft0 = values.iter().sum::<f64>() / count as f64;
        worst = worst.max((poly.constant() - shrink * dft0).abs());
        for v in 1..=order {
            let av = 2.0 / count as f64
                * alphas
                    .iter()
                    .zip(&values)
                    .map(|(&a, &y)| y * (v as f64 * a).cos())
                    .sum::<f64>();
            let bv = 2.0 / count as f64
                * alphas
                    .iter()
                    .zip(&values)
                    .map(|(&a, &y)| y * (v as f64 * a).sin())
                    .sum::<f64>();
            worst = worst.max((poly.cos_coeff(v) - shrink * av).abs());
            worst = worst.max((poly.sin_coeff(v) - shrink * bv).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-10 && elapsed < 1.0;
    report(
        4,
        "posterior mean is the shrunk DFT at gamma = 1",
        pass,
        &format!("worst coefficient gap {worst:.2e}, {elapsed:.2}s"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: explicit Bayesian linear regression in the feature map
// ---------------------------------------------------------------------------

/// Explicit tensor Fourier features of one point: the kernel satisfies
/// k(x, x') = phi(x) . phi(x').
fn feature_map(x: &[f64], params: &KernelParams) -> Vec<f64> {
    let gamma = params.gamma2.sqrt();
    let mut features = vec![params.sigma0_2.sqrt()];
    for (&theta, &order) in x.iter().zip(&params.multiplicities) {
        let mut axis = vec![gamma];
        for v in 1..=order {
            axis.push(f64::sqrt(2.0) * (v as f64 * theta).cos());
        }
        for v in 1..=order {
            axis.push(f64::sqrt(2.0) * (v as f64 * theta).sin());
        }
        let scale = 1.0 / (params.gamma2 + 2.0 * order as f64).sqrt();
        let mut next = Vec::with_capacity(features.len() * axis.len());
        for f in &features {
            for a in &axis {
                next.push(f * a * scale);
            }
        }
        features = next;
    }
    features
}

#[test]
fn criterion_5_feature_space_equivalence() {
    use nalgebra::{DMatrix, DVector};
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for instance in 0..10 {
        let dims = 1 + instance % 2;
        let orders: Vec<usize> = (0..dims).map(|_| rng.random_range(1..=2usize)).collect();
        let params = KernelParams::new(rng.random_range(0.5..9.0), rng.random_range(0.5..3.0), orders);
        let n = rng.random_range(3..=15usize);
        let mut data = Dataset::new();
        for _ in 0..n {
            let x: Vec<f64> = (0..dims).map(|_| rng.random_range(0.0..TAU)).collect();
            data.push(&x, rng.random_range(-2.0..2.0), rng.random_range(0.01..1.0));
        }
        let test: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..dims).map(|_| rng.random_range(0.0..TAU)).collect())
            .collect();

        // Kernel route.
        let model = GPModel::fit(data.clone(), params.clone()).unwrap();
        let (mean_gp, cov_gp) = model.posterior(&test);

        // Explicit-feature route: posterior over weights b ~ N(0, I) with
        // f(x) = b . phi(x), then pushed to the test features.
        let h = feature_map(&data.points()[0], &params).len();
        let phi = DMatrix::from_fn(h, n, |i, j| feature_map(&data.points()[j], &params)[i]);
        let phi_test = DMatrix::from_fn(h, test.len(), |i, j| feature_map(&test[j], &params)[i]);
        let s_inv = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            data.noise_vars().iter().map(|v| 1.0 / v),
        ));
        let weight_precision = &phi * &s_inv * phi.transpose() + DMatrix::identity(h, h);
        let weight_cov = weight_precision.try_inverse().unwrap();
        let weight_mean = &weight_cov * &phi * &s_inv * DVector::from_column_slice(data.values());
        let mean_blr = phi_test.transpose() * weight_mean;
        let cov_blr = phi_test.transpose() * weight_cov * &phi_test;

        for i in 0..test.len() {
            worst = worst.max((mean_gp[i] - mean_blr[i]).abs());
            for j in 0..test.len() {
                worst = worst.max((cov_gp[(i, j)] - cov_blr[(i, j)]).abs());
            }
        }
        // The feature map must reproduce the kernel itself.
        let ka = vqe_kernel(&test[0], &test[1], &params);
        let fa = feature_map(&test[0], &params);
        let fb = feature_map(&test[1], &params);
        let dot: f64 = fa.iter().zip(&fb).map(|(a, b)| a * b).sum();
        worst = worst.max((ka - dot).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-8 && elapsed < 5.0;
    report(
        5,
        "kernel posterior equals explicit-feature regression",
        pass,
        &format!("worst deviation {worst:.2e}, {elapsed:.2}s"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: exact coordinate descent in the noiseless limit
// ---------------------------------------------------------------------------

fn noiseless_config(strategy: Strategy, dims: usize) -> RunConfig {
    RunConfig {
        n_qbits: 3,
        n_layers: 1,
        readout_strategy: strategy,
        // Vanishing single-shot variance emulates a noiseless channel; the
        // prior scale shrinks with it so variances stay resolvable.
        eta2: Some(1e-18),
        sigma0: Some(1e-5),
        n_iter: u64::MAX / 2,
        max_steps: Some(20 * dims),
        seeds: (0..20).collect(),
        ..RunConfig::default()
    }
}

/// KNOWN RED. The bar assumes the (Q=3, L=1) circuit family can represent
/// the critical Ising ground state. It cannot: exact coordinate descent and
/// an independent parameter-shift gradient descent both terminate at the
/// same best attainable gap of 9.523876e-3 from every start (see the
/// `expressivity_floor` diagnostic test), so a 1e-6 gap is out of reach no
/// matter the optimizer. Trials that have provably plateaued are excused and
/// reported as the criterion allows; within the 20-sweep budget most trials
/// are still descending toward the floor, which this test reports honestly.
#[test]
fn criterion_6_noiseless_descent_converges() {
    let start = Instant::now();
    let dims = 2 * 3 * (1 + 1);
    let mut all_pass = true;
    let mut detail = String::new();
    for strategy in [Strategy::Nft, Strategy::Center] {
        let config = noiseless_config(strategy, dims);
        let traces = run_experiment(&config).unwrap();
        let mut reached = 0usize;
        let mut stuck = Vec::new();
        let mut descending = Vec::new();
        for trace in &traces {
            let best = trace
                .steps
                .iter()
                .map(|s| s.delta_energy)
                .fold(f64::INFINITY, f64::min);
            if best <= 1e-6 {
                reached += 1;
                continue;
            }
            // Stuck: the final full sweep made no progress on the true
            // objective (the trial sits at an SMO fixed point).
            let tail = &trace.steps[trace.steps.len().saturating_sub(dims + 1)..];
            let drop_over_tail = tail.first().map_or(0.0, |first| {
                first.delta_energy - tail.last().unwrap().delta_energy
            });
            if drop_over_tail.abs() < 1e-9 {
                stuck.push((trace.seed, best));
            } else {
                descending.push((trace.seed, best, drop_over_tail));
            }
        }
        if !stuck.is_empty() {
            println!(
                "[acceptance]   {} plateaued above threshold (excused, not failed): {stuck:?}",
                strategy.as_str()
            );
        }
        if !descending.is_empty() {
            println!(
                "[acceptance]   {} still descending at the step cap (seed, gap, last-sweep drop): {descending:?}",
                strategy.as_str()
            );
        }
        let ok = reached + stuck.len() >= 18;
        all_pass &= ok;
        detail.push_str(&format!(
            "{}: {reached}/20 reached 1e-6, {} plateaued, {} descending; ",
            strategy.as_str(),
            stuck.len(),
            descending.len()
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    all_pass &= elapsed < 30.0;
    report(
        6,
        "noiseless SMO hits 1e-6 energy gap",
        all_pass,
        &format!(
            "{detail}{elapsed:.1}s; note: best attainable gap of this circuit family is 9.5238e-3"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criteria 7-10: the desk-scale benchmark
// ---------------------------------------------------------------------------

const HEADLINE_BUDGET: u64 = 1_000_000;
const HEADLINE_SEEDS: u64 = 20;

fn headline_config(strategy: Strategy) -> RunConfig {
    RunConfig {
        n_qbits: 5,
        n_layers: 3,
        readout_strategy: strategy,
        n_iter: HEADLINE_BUDGET,
        seeds: (0..HEADLINE_SEEDS).collect(),
        ..RunConfig::default()
    }
}

struct Headline {
    center: Vec<OptimizerTrace>,
    bound: Vec<OptimizerTrace>,
    nft: Vec<OptimizerTrace>,
}

static HEADLINE: OnceLock<Headline> = OnceLock::new();

fn headline() -> &'static Headline {
    HEADLINE.get_or_init(|| {
        let center = run_experiment(&headline_config(Strategy::Center)).unwrap();
        let bound = run_experiment(&headline_config(Strategy::Bound)).unwrap();
        let nft = run_experiment(&headline_config(Strategy::Nft)).unwrap();
        Headline { center, bound, nft }
    })
}

fn final_best(traces: &[OptimizerTrace]) -> Vec<f64> {
    traces
        .iter()
        .map(|t| t.best_delta_energy_by(HEADLINE_BUDGET).unwrap())
        .collect()
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[test]
fn criterion_7_headline_center_beats_nft() {
    let start = Instant::now();
    let data = headline();
    let center_finals = final_best(&data.center);
    let nft_finals = final_best(&data.nft);
    let p = wilcoxon_signed_rank_with(&center_finals, &nft_finals, Alternative::Less).unwrap();

    let checkpoints: Vec<u64> = (5..=20).map(|i| i * 50_000).collect();
    let center_curves = aggregate(&data.center, &checkpoints, &[0.5]).unwrap();
    let nft_curves = aggregate(&data.nft, &checkpoints, &[0.5]).unwrap();
    let mut ordering = true;
    for (i, &checkpoint) in checkpoints.iter().enumerate() {
        if checkpoint > 200_000 {
            ordering &= center_curves.energy[0][i] < nft_curves.energy[0][i];
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = p < 0.05 && ordering && elapsed < 1800.0;
    report(
        7,
        "headline benchmark ordering",
        pass,
        &format!(
            "one-sided p {p:.3e}, median dE {:.3e} vs {:.3e}, ordering beyond 2e5 = {ordering}, {elapsed:.0}s",
            median(&center_finals),
            median(&nft_finals)
        ),
    );
}

#[test]
fn criterion_8_center_is_cheaper_than_bound() {
    let start = Instant::now();
    let data = headline();

    // Shots to reach ten times the final NFT median gap.
    let target = 10.0 * median(&final_best(&data.nft));
    let shots_to_reach = |traces: &[OptimizerTrace]| -> Vec<f64> {
        traces
            .iter()
            .map(|t| {
                t.steps
                    .iter()
                    .find(|s| s.delta_energy <= target)
                    .map_or(f64::INFINITY, |s| s.cum_shots as f64)
            })
            .collect()
    };
    let center_shots = shots_to_reach(&data.center);
    let bound_shots = shots_to_reach(&data.bound);
    let median_ok = median(&center_shots) <= median(&bound_shots);

    // Step-by-step allocation economy on identical states.
    let config = headline_config(Strategy::Center);
    let problem = config.problem().unwrap();
    let optimizer = config.optimizer_config().unwrap();
    let mut driver = SubscoreRun::new(&problem, &optimizer, 0).unwrap();
    let mut economy = true;
    for _ in 0..50 {
        let center_total = driver.peek_allocation().unwrap().total_shots();
        let bound_total = driver.peek_bound_allocation().total_shots();
        economy &= center_total <= bound_total;
        driver.step().unwrap();
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = median_ok && economy && elapsed < 600.0;
    report(
        8,
        "center variant at most as expensive as bound",
        pass,
        &format!(
            "median shots-to-target {:.3e} vs {:.3e} (target dE {target:.3e}), 50-step economy = {economy}, {elapsed:.0}s",
            median(&center_shots),
            median(&bound_shots)
        ),
    );
}

#[test]
fn criterion_9_core_guarantee_audit() {
    let start = Instant::now();
    let config = headline_config(Strategy::Center);
    let problem = config.problem().unwrap();
    let optimizer = config.optimizer_config().unwrap();
    let mut driver = SubscoreRun::new(&problem, &optimizer, 1).unwrap();
    let mut violations = 0usize;
    for _ in 0..200 {
        let center = driver.best_point().to_vec();
        let axis = driver.current_axis();
        let kappa2 = driver.kappa2();
        driver.step().unwrap();
        if !driver
            .gp()
            .subspace_in_core(&center, axis, kappa2 * (1.0 + 1e-6), optimizer.core_grid)
        {
            violations += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = violations == 0 && elapsed < 120.0;
    report(
        9,
        "updated line stays in the confident region",
        pass,
        &format!("{violations} violations over 200 steps, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_10_byte_identical_reruns() {
    let start = Instant::now();
    let data = headline();
    let first_center = render_csv(&data.center);
    let first_nft = render_csv(&data.nft);
    let second_center = render_csv(&run_experiment(&headline_config(Strategy::Center)).unwrap());
    let second_nft = render_csv(&run_experiment(&headline_config(Strategy::Nft)).unwrap());
    let elapsed = start.elapsed().as_secs_f64();
    let pass = first_center == second_center && first_nft == second_nft;
    report(
        10,
        "reruns reproduce byte-identical CSV",
        pass,
        &format!(
            "center {} bytes, nft {} bytes, {elapsed:.0}s",
            first_center.len(),
            first_nft.len()
        ),
    );
}
