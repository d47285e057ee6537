//! 1D trigonometric polynomial regression and minimization.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::TAU;

use crate::error::Error;
use crate::Result;

/// `f(theta) = c0 + sum_v (ccos_v cos(v theta) + csin_v sin(v theta))`
/// stored as `[c0, ccos_1..ccos_V, csin_1..csin_V]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly1D {
    order: usize,
    coeffs: Vec<f64>,
}

impl TrigPoly1D {
    pub fn new(order: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), 1 + 2 * order);
        assert!(coeffs.iter().all(|c| c.is_finite()));
        Self { order, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn constant(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn cos_coeff(&self, v: usize) -> f64 {
        self.coeffs[v]
    }

    pub fn sin_coeff(&self, v: usize) -> f64 {
        self.coeffs[self.order + v]
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut value = self.coeffs[0];
        for v in 1..=self.order {
            let arg = v as f64 * theta;
            value += self.cos_coeff(v) * arg.cos() + self.sin_coeff(v) * arg.sin();
        }
        value
    }

    fn derivative(&self, theta: f64) -> f64 {
        let mut value = 0.0;
        for v in 1..=self.order {
            let vf = v as f64;
            let arg = vf * theta;
            value += -vf * self.cos_coeff(v) * arg.sin() + vf * self.sin_coeff(v) * arg.cos();
        }
        value
    }

    fn second_derivative(&self, theta: f64) -> f64 {
        let mut value = 0.0;
        for v in 1..=self.order {
            let vf = v as f64;
            let arg = vf * theta;
            value += -vf * vf * self.cos_coeff(v) * arg.cos() - vf * vf * self.sin_coeff(v) * arg.sin();
        }
        value
    }
}

/// Least-squares fit of an order-`V` trigonometric polynomial. With exactly
/// `1 + 2V` distinct angles this interpolates; with more it solves the
/// (optionally weighted) normal problem via SVD. Duplicate angles make the
/// design rank-deficient and are rejected.
pub fn fit_trig_1d(
    angles: &[f64],
    values: &[f64],
    weights: Option<&[f64]>,
    order: usize,
) -> Result<TrigPoly1D> {
    let n = angles.len();
    let cols = 1 + 2 * order;
    if values.len() != n {
        return Err(Error::InvalidInput(format!(
            "got {n} angles but {} values",
            values.len()
        )));
    }
    if n < cols {
        return Err(Error::InvalidInput(format!(
            "order {order} needs at least {cols} samples, got {n}"
        )));
    }
    if let Some(w) = weights {
        if w.len() != n || w.iter().any(|&wi| !(wi > 0.0)) {
            return Err(Error::InvalidInput("weights must be positive, one per sample".into()));
        }
    }
    let mut design = DMatrix::<f64>::zeros(n, cols);
    let mut rhs = DVector::<f64>::zeros(n);
    for (i, (&theta, &y)) in angles.iter().zip(values).enumerate() {
        let w = weights.map_or(1.0, |w| w[i].sqrt());
        design[(i, 0)] = w;
        for v in 1..=order {
            let arg = v as f64 * theta;
            design[(i, v)] = w * arg.cos();
            design[(i, order + v)] = w * arg.sin();
        }
        rhs[i] = w * y;
    }
    let svd = design.svd(true, true);
    let max_singular = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * max_singular)
        .count();
    if rank < cols {
        return Err(Error::InvalidInput(
            "rank-deficient trigonometric design (duplicate angles?)".into(),
        ));
    }
    let solution = svd
        .solve(&rhs, 1e-10 * max_singular)
        .map_err(|e| Error::NumericalFailure(format!("trig least squares: {e}")))?;
    Ok(TrigPoly1D::new(order, solution.iter().cloned().collect()))
}

/// Global minimum of the polynomial on `[0, 2*pi)`. Order 1 has the closed
/// form `theta* = atan2(-c_sin, -c_cos)`; higher orders use a 1024-point grid
/// scan refined by safeguarded Newton steps on the derivative. If every
/// non-constant coefficient is below 1e-14 the polynomial is flat and
/// `(0, c0)` is returned.
pub fn minimize_trig_1d(poly: &TrigPoly1D) -> (f64, f64) {
    let flat = poly.coeffs[1..].iter().all(|c| c.abs() < 1e-14);
    if flat {
        return (0.0, poly.constant());
    }
    if poly.order() == 1 {
        let (a, b) = (poly.cos_coeff(1), poly.sin_coeff(1));
        let theta = f64::atan2(-b, -a).rem_euclid(TAU);
        return (theta, poly.constant() - (a * a + b * b).sqrt());
    }
    const GRID: usize = 1024;
    let mut best_theta = 0.0;
    let mut best_value = f64::INFINITY;
    for k in 0..GRID {
        let theta = TAU * k as f64 / GRID as f64;
        let value = poly.eval(theta);
        if value < best_value {
            best_value = value;
            best_theta = theta;
        }
    }
    // Newton on f' from the best grid point; the grid is fine enough that the
    // nearest stationary point is the global minimum.
    let mut theta = best_theta;
    for _ in 0..64 {
        let d1 = poly.derivative(theta);
        let d2 = poly.second_derivative(theta);
        if d2 <= 0.0 {
            break;
        }
        let step = d1 / d2;
        if !step.is_finite() {
            break;
        }
        theta -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    theta = theta.rem_euclid(TAU);
    let refined = poly.eval(theta);
    if refined <= best_value {
        (theta, refined)
    } else {
        (best_theta, best_value)
    }
}
