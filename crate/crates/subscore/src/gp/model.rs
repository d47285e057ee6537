//! Dataset, factored GP posterior, CoRe membership, and line queries.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use std::f64::consts::TAU;

use super::kernel::{vqe_kernel, KernelParams};
use super::trig::{fit_trig_1d, minimize_trig_1d};
use crate::error::Error;
use crate::Result;

fn wrap_angle(theta: f64) -> f64 {
    theta.rem_euclid(TAU)
}

/// Observed points, values, and per-point noise variances. Angles are stored
/// wrapped to `[0, 2*pi)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    noise_vars: Vec<f64>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, point: &[f64], value: f64, noise_var: f64) {
        assert!(value.is_finite(), "observed value must be finite");
        assert!(
            noise_var > 0.0 && noise_var.is_finite(),
            "noise variance must be positive and finite, got {noise_var}"
        );
        if let Some(first) = self.points.first() {
            assert_eq!(first.len(), point.len(), "mixed dimensionality in dataset");
        }
        self.points.push(point.iter().map(|&t| wrap_angle(t)).collect());
        self.values.push(value);
        self.noise_vars.push(noise_var);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise_vars(&self) -> &[f64] {
        &self.noise_vars
    }

    /// Splits into (first `n` rows, rest).
    pub fn split_at(&self, n: usize) -> (Dataset, Dataset) {
        let head = Dataset {
            points: self.points[..n].to_vec(),
            values: self.values[..n].to_vec(),
            noise_vars: self.noise_vars[..n].to_vec(),
        };
        let tail = Dataset {
            points: self.points[n..].to_vec(),
            values: self.values[n..].to_vec(),
            noise_vars: self.noise_vars[n..].to_vec(),
        };
        (head, tail)
    }
}

/// The `1 + 2V` equidistant points `center + 2*pi*w/(1+2V) * e_axis`,
/// `w = 0..=2V`; index 0 is the center itself.
pub fn equidistant_line_points(center: &[f64], axis: usize, order: usize) -> Vec<Vec<f64>> {
    let count = 1 + 2 * order;
    (0..count)
        .map(|w| {
            let mut p = center.to_vec();
            p[axis] = wrap_angle(center[axis] + TAU * w as f64 / count as f64);
            p
        })
        .collect()
}

/// `grid` equidistant test angles along the line through `center` parallel
/// to `axis`.
pub fn line_grid(center: &[f64], axis: usize, grid: usize) -> Vec<Vec<f64>> {
    (0..grid)
        .map(|k| {
            let mut p = center.to_vec();
            p[axis] = wrap_angle(center[axis] + TAU * k as f64 / grid as f64);
            p
        })
        .collect()
}

struct Factor {
    chol: Cholesky<f64, Dyn>,
    /// `(K + Diag(sigma))^{-1} y`
    alpha: DVector<f64>,
    jitter: f64,
}

/// GP regression model over a [`Dataset`] with the VQE kernel. Immutable
/// after construction; updates build a new model.
pub struct GPModel {
    data: Dataset,
    params: KernelParams,
    factor: Option<Factor>,
}

/// Jitter escalation: start at `1e-10 * sigma0^2`, multiply by 10 up to
/// `1e-6 * sigma0^2`, then give up. Observation noise floors keep the system
/// well conditioned in normal operation, so deeper failures indicate a bug.
const JITTER_START: f64 = 1e-10;
const JITTER_LIMIT: f64 = 1e-6;

fn cholesky_with_jitter(
    mut matrix: DMatrix<f64>,
    sigma0_2: f64,
) -> Result<(Cholesky<f64, Dyn>, f64)> {
    if let Some(chol) = Cholesky::new(matrix.clone()) {
        return Ok((chol, 0.0));
    }
    let mut jitter = JITTER_START * sigma0_2;
    let mut applied = jitter;
    loop {
        for i in 0..matrix.nrows() {
            matrix[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(matrix.clone()) {
            return Ok((chol, applied));
        }
        if applied >= JITTER_LIMIT * sigma0_2 {
            return Err(Error::NumericalFailure(format!(
                "Cholesky failed after jitter escalation to {applied:.3e}"
            )));
        }
        jitter = applied * 9.0; // diagonal already carries `applied`
        applied *= 10.0;
    }
}

impl GPModel {
    pub fn fit(data: Dataset, params: KernelParams) -> Result<Self> {
        if data.is_empty() {
            return Ok(Self {
                data,
                params,
                factor: None,
            });
        }
        if data.points()[0].len() != params.dims() {
            return Err(Error::InvalidInput(format!(
                "dataset dimension {} does not match kernel dimension {}",
                data.points()[0].len(),
                params.dims()
            )));
        }
        let n = data.len();
        let mut system = DMatrix::<f64>::from_fn(n, n, |i, j| {
            vqe_kernel(&data.points()[i], &data.points()[j], &params)
        });
        for i in 0..n {
            system[(i, i)] += data.noise_vars()[i];
        }
        let (chol, jitter) = cholesky_with_jitter(system, params.sigma0_2)?;
        let alpha = chol.solve(&DVector::from_column_slice(data.values()));
        Ok(Self {
            data,
            params,
            factor: Some(Factor { chol, alpha, jitter }),
        })
    }

    /// Refits the same data under new kernel parameters.
    pub fn with_params(&self, params: KernelParams) -> Result<Self> {
        Self::fit(self.data.clone(), params)
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn jitter(&self) -> f64 {
        self.factor.as_ref().map_or(0.0, |f| f.jitter)
    }

    fn cross_kernel(&self, test: &[Vec<f64>]) -> DMatrix<f64> {
        DMatrix::from_fn(self.data.len(), test.len(), |i, j| {
            vqe_kernel(&self.data.points()[i], &test[j], &self.params)
        })
    }

    /// Posterior mean vector and covariance matrix at the test points.
    /// With no training data this is the prior: zero mean, kernel covariance.
    pub fn posterior(&self, test: &[Vec<f64>]) -> (DVector<f64>, DMatrix<f64>) {
        let m = test.len();
        let prior = DMatrix::from_fn(m, m, |i, j| vqe_kernel(&test[i], &test[j], &self.params));
        match &self.factor {
            None => (DVector::zeros(m), prior),
            Some(factor) => {
                let cross = self.cross_kernel(test);
                let mean = cross.transpose() * &factor.alpha;
                let half = factor
                    .chol
                    .l()
                    .solve_lower_triangular(&cross)
                    .expect("triangular solve cannot fail on a Cholesky factor");
                let cov = prior - half.transpose() * half;
                (mean, cov)
            }
        }
    }

    /// Posterior mean at a single point.
    pub fn posterior_mean(&self, x: &[f64]) -> f64 {
        match &self.factor {
            None => 0.0,
            Some(factor) => {
                let k: DVector<f64> = DVector::from_fn(self.data.len(), |i, _| {
                    vqe_kernel(&self.data.points()[i], x, &self.params)
                });
                k.dot(&factor.alpha)
            }
        }
    }

    /// Diagonal of the posterior covariance at the test points.
    pub fn posterior_variances(&self, test: &[Vec<f64>]) -> Vec<f64> {
        match &self.factor {
            None => test
                .iter()
                .map(|x| vqe_kernel(x, x, &self.params))
                .collect(),
            Some(factor) => {
                let cross = self.cross_kernel(test);
                let half = factor
                    .chol
                    .l()
                    .solve_lower_triangular(&cross)
                    .expect("triangular solve cannot fail on a Cholesky factor");
                test.iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let explained = half.column(j).norm_squared();
                        vqe_kernel(x, x, &self.params) - explained
                    })
                    .collect()
            }
        }
    }

    /// Posterior variance at a single point.
    pub fn posterior_variance(&self, x: &[f64]) -> f64 {
        self.posterior_variances(std::slice::from_ref(&x.to_vec()))[0]
    }

    /// CoRe membership: posterior variance at `x` within the threshold.
    pub fn core_contains(&self, kappa2: f64, x: &[f64]) -> bool {
        assert!(kappa2 > 0.0);
        self.posterior_variance(x) <= kappa2
    }

    /// Whether the whole line `{center + alpha e_axis}` sits inside the CoRe,
    /// checked on `grid` equidistant test angles.
    pub fn subspace_in_core(&self, center: &[f64], axis: usize, kappa2: f64, grid: usize) -> bool {
        let order = self.params.multiplicities[axis];
        assert!(
            grid >= 2 * (1 + 2 * order),
            "grid of {grid} undersamples an order-{order} variance curve"
        );
        let test = line_grid(center, axis, grid);
        self.posterior_variances(&test).iter().all(|&s| s <= kappa2)
    }

    /// Minimizes the posterior mean along the axis-`axis` line through
    /// `center`. The mean restricted to the line is exactly an order-`V_d`
    /// trigonometric polynomial, so evaluating it at `1 + 2 V_d` equidistant
    /// angles identifies it; the fit is then minimized in closed form.
    pub fn minimize_on_line(&self, center: &[f64], axis: usize) -> (Vec<f64>, f64) {
        assert!(!self.data.is_empty(), "cannot minimize the mean of an empty model");
        let order = self.params.multiplicities[axis];
        let nodes = equidistant_line_points(center, axis, order);
        let angles: Vec<f64> = (0..nodes.len())
            .map(|w| TAU * w as f64 / nodes.len() as f64)
            .collect();
        let means: Vec<f64> = nodes.iter().map(|p| self.posterior_mean(p)).collect();
        let poly = fit_trig_1d(&angles, &means, None, order)
            .expect("equidistant interpolation design is full rank");
        let (theta, value) = minimize_trig_1d(&poly);
        let mut minimizer = center.to_vec();
        minimizer[axis] = wrap_angle(center[axis] + theta);
        (minimizer, value)
    }

    /// Leave-one-out negative log predictive density, from the factored
    /// system in closed form.
    pub(crate) fn loo_nlpd(&self) -> f64 {
        let factor = self.factor.as_ref().expect("LOO needs a non-empty model");
        let n = self.data.len();
        let l_inv = factor
            .chol
            .l()
            .solve_lower_triangular(&DMatrix::<f64>::identity(n, n))
            .expect("triangular solve cannot fail on a Cholesky factor");
        let mut nlpd = 0.0;
        for i in 0..n {
            // Precision diagonal A_ii of (K + Diag(sigma))^{-1}; the held-out
            // predictive for y_i is N(y_i - alpha_i / A_ii, 1 / A_ii).
            let a_ii: f64 = l_inv.column(i).norm_squared();
            let alpha_i = factor.alpha[i];
            nlpd += 0.5 * (TAU / a_ii).ln() + alpha_i * alpha_i / (2.0 * a_ii);
        }
        nlpd
    }
}

/// Fast repeated feasibility checks for the shot search: a fixed base model
/// plus `m` pending observation points whose noise variances change between
/// queries. All base-dependent blocks are factored once; each query costs
/// `O(grid * m^2)`.
pub struct LineProbe {
    prior_var: f64,
    /// `W = L_A^{-1} B`, `N x m`; empty when the base model has no data.
    wtw: DMatrix<f64>,
    new_kernel: DMatrix<f64>,
    /// Base-explained variance `u^T u` at each grid point.
    base_quad: Vec<f64>,
    /// `k(X_new, x'_g)` per grid point, `m x grid`.
    cross_new: DMatrix<f64>,
    /// `W^T U`, `m x grid`; zero when the base model has no data.
    wtu: DMatrix<f64>,
    sigma0_2: f64,
}

impl LineProbe {
    pub fn new(model: &GPModel, new_points: &[Vec<f64>], center: &[f64], axis: usize, grid: usize) -> Self {
        let params = model.params();
        let m = new_points.len();
        let test = line_grid(center, axis, grid);
        let new_kernel = DMatrix::from_fn(m, m, |i, j| {
            vqe_kernel(&new_points[i], &new_points[j], params)
        });
        let cross_new = DMatrix::from_fn(m, grid, |i, g| vqe_kernel(&new_points[i], &test[g], params));
        match &model.factor {
            None => Self {
                prior_var: params.sigma0_2,
                wtw: DMatrix::zeros(m, m),
                new_kernel,
                base_quad: vec![0.0; grid],
                cross_new,
                wtu: DMatrix::zeros(m, grid),
                sigma0_2: params.sigma0_2,
            },
            Some(factor) => {
                let n = model.data.len();
                let b = DMatrix::from_fn(n, m, |i, j| {
                    vqe_kernel(&model.data.points()[i], &new_points[j], params)
                });
                let w = factor
                    .chol
                    .l()
                    .solve_lower_triangular(&b)
                    .expect("triangular solve cannot fail on a Cholesky factor");
                let cross_base = model.cross_kernel(&test);
                let u = factor
                    .chol
                    .l()
                    .solve_lower_triangular(&cross_base)
                    .expect("triangular solve cannot fail on a Cholesky factor");
                let base_quad = (0..grid).map(|g| u.column(g).norm_squared()).collect();
                Self {
                    prior_var: params.sigma0_2,
                    wtw: w.transpose() * &w,
                    new_kernel,
                    base_quad,
                    cross_new,
                    wtu: w.transpose() * u,
                    sigma0_2: params.sigma0_2,
                }
            }
        }
    }

    /// Largest posterior variance over the grid if the pending points were
    /// observed with the given noise variances. Returns infinity when the
    /// extended system cannot be factored (treated as infeasible).
    pub fn max_variance(&self, new_noise: &[f64]) -> f64 {
        let m = new_noise.len();
        assert_eq!(m, self.new_kernel.nrows(), "one noise entry per pending point");
        let grid = self.base_quad.len();
        if m == 0 {
            return (0..grid)
                .map(|g| self.prior_var - self.base_quad[g])
                .fold(f64::NEG_INFINITY, f64::max);
        }
        // Schur complement of the base block in the extended system.
        let mut schur = &self.new_kernel - &self.wtw;
        for i in 0..m {
            schur[(i, i)] += new_noise[i];
        }
        let Ok((chol, _)) = cholesky_with_jitter(schur, self.sigma0_2) else {
            return f64::INFINITY;
        };
        let mut residual = &self.cross_new - &self.wtu;
        let solved = chol
            .l()
            .solve_lower_triangular_mut(&mut residual)
            .then_some(residual);
        let Some(half) = solved else {
            return f64::INFINITY;
        };
        (0..grid)
            .map(|g| self.prior_var - self.base_quad[g] - half.column(g).norm_squared())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn feasible(&self, new_noise: &[f64], kappa2: f64) -> bool {
        self.max_variance(new_noise) <= kappa2
    }
}
