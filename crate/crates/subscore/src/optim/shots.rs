//! Shot allocation over the equidistant line points.
//!
//! Both variants keep the whole updated line inside the CoRe. The bound
//! variant prices every point at the threshold itself, which is always
//! sufficient because equidistant observations leave a uniform posterior
//! variance strictly below their observation noise. The center variant
//! searches for the cheapest allocation directly: shot counts are integers
//! and the posterior variance shrinks monotonically as any noise entry
//! shrinks, so the minimal feasible count is found by integer bisection.

use crate::error::Error;
use crate::gp::{equidistant_line_points, GPModel, LineProbe};
use crate::Result;

/// The line points of one step with their shot counts. `points[0]` is the
/// center (the incumbent best point); a zero shot count means the point is
/// skipped entirely. `variances[i] = eta2 / shots[i]` is the realized
/// observation noise (infinite for skipped points).
#[derive(Clone, Debug, PartialEq)]
pub struct ShotAllocation {
    pub points: Vec<Vec<f64>>,
    pub shots: Vec<u64>,
    pub variances: Vec<f64>,
}

impl ShotAllocation {
    pub fn total_shots(&self) -> u64 {
        self.shots.iter().sum()
    }
}

/// Every one of the `1 + 2V` points gets `ceil(eta2 / kappa2)` shots. The
/// realized noise `eta2 / N <= kappa2` keeps the line in the CoRe regardless
/// of prior data.
pub fn choose_shots_bound(
    center: &[f64],
    axis: usize,
    kappa2: f64,
    eta2: f64,
    order: usize,
) -> ShotAllocation {
    assert!(kappa2 > 0.0 && eta2 > 0.0);
    let per_point = (eta2 / kappa2).ceil().max(1.0) as u64;
    let points = equidistant_line_points(center, axis, order);
    let count = points.len();
    ShotAllocation {
        points,
        shots: vec![per_point; count],
        variances: vec![eta2 / per_point as f64; count],
    }
}

/// Smallest integer in `[1, hi]` satisfying `feasible`; `hi` itself must be
/// feasible. Standard bisection with an infeasible sentinel at 0.
fn minimal_feasible(hi: u64, feasible: impl Fn(u64) -> bool) -> u64 {
    let mut lo = 0u64; // infeasible side
    let mut hi = hi; // feasible side
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Two-stage allocation that exploits the surrogate's existing knowledge.
/// Stage 1 ties all `1 + 2V` points to one shot count and bisects for the
/// smallest count that keeps the line in the CoRe. Stage 2 fixes the shifted
/// points there and relaxes the center: if the shifts alone suffice the
/// center is skipped outright, otherwise its count is bisected separately.
/// The total never exceeds the bound variant's on the same state.
pub fn choose_shots_center(
    model: &GPModel,
    center: &[f64],
    axis: usize,
    kappa2: f64,
    eta2: f64,
    grid: usize,
) -> Result<ShotAllocation> {
    assert!(kappa2 > 0.0 && eta2 > 0.0);
    let order = model.params().multiplicities[axis];
    let points = equidistant_line_points(center, axis, order);
    let count = points.len();
    let worst_case = (eta2 / kappa2).ceil().max(1.0) as u64;

    let tied_probe = LineProbe::new(model, &points, center, axis, grid);
    let tied_feasible = |n: u64| tied_probe.feasible(&vec![eta2 / n as f64; count], kappa2);
    if !tied_feasible(worst_case) {
        // Unreachable by the uniform-variance bound; if floating-point noise
        // ever lands here, escalate rather than under-deliver.
        let mut hi = worst_case;
        loop {
            hi = hi.saturating_mul(2);
            if tied_feasible(hi) {
                break;
            }
            if hi > 1_000_000_000 {
                return Err(Error::NumericalFailure(
                    "no feasible tied allocation below 1e9 shots per point".into(),
                ));
            }
        }
        let tied = minimal_feasible(hi, tied_feasible);
        return Ok(finish_center_stage(
            model, center, axis, kappa2, eta2, grid, points, tied,
        ));
    }
    let tied = minimal_feasible(worst_case, tied_feasible);
    Ok(finish_center_stage(
        model, center, axis, kappa2, eta2, grid, points, tied,
    ))
}

fn finish_center_stage(
    model: &GPModel,
    center: &[f64],
    axis: usize,
    kappa2: f64,
    eta2: f64,
    grid: usize,
    points: Vec<Vec<f64>>,
    tied: u64,
) -> ShotAllocation {
    let count = points.len();
    let shift_var = eta2 / tied as f64;

    // Can the shifted points carry the whole line on their own?
    let shifts_only: Vec<Vec<f64>> = points[1..].to_vec();
    let shifts_probe = LineProbe::new(model, &shifts_only, center, axis, grid);
    let center_shots = if shifts_probe.feasible(&vec![shift_var; count - 1], kappa2) {
        0
    } else {
        let full_probe = LineProbe::new(model, &points, center, axis, grid);
        let center_feasible = |n: u64| {
            let mut noise = vec![shift_var; count];
            noise[0] = eta2 / n as f64;
            full_probe.feasible(&noise, kappa2)
        };
        minimal_feasible(tied, center_feasible)
    };

    let mut shots = vec![tied; count];
    shots[0] = center_shots;
    let variances = shots
        .iter()
        .map(|&n| if n == 0 { f64::INFINITY } else { eta2 / n as f64 })
        .collect();
    ShotAllocation {
        points,
        shots,
        variances,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{uniform_posterior_variance, Dataset, KernelParams, DEFAULT_CORE_GRID};

    fn empty_model(orders: Vec<usize>) -> GPModel {
        GPModel::fit(Dataset::new(), KernelParams::new(1.0, 1.0, orders)).unwrap()
    }

    #[test]
    fn bound_reproduces_initial_threshold_counts() {
        let alloc = choose_shots_bound(&[0.0, 0.0], 0, 1.0 / 512.0, 1.0, 1);
        assert_eq!(alloc.shots, vec![512; 3]);
        assert_eq!(alloc.total_shots(), 1536);
    }

    #[test]
    fn bound_floors_at_one_shot() {
        let alloc = choose_shots_bound(&[0.0], 0, 2.0, 1.0, 1);
        assert_eq!(alloc.shots, vec![1; 3]);
    }

    #[test]
    fn bound_point_count_follows_order() {
        let alloc = choose_shots_bound(&[0.0, 0.0], 1, 0.5, 1.0, 2);
        assert_eq!(alloc.points.len(), 5);
    }

    #[test]
    fn empty_gp_center_matches_closed_form_inverse() {
        // With no prior data the tied stage must stop exactly where the
        // uniform-variance formula crosses the threshold.
        let params = KernelParams::new(1.0, 1.0, vec![1, 1]);
        let model = empty_model(vec![1, 1]);
        let eta2 = 1.0;
        // Kept off the integer lattice so the feasibility boundary does not
        // land exactly on a shot count.
        let kappa2 = eta2 / 317.3;
        let alloc =
            choose_shots_center(&model, &[1.0, 2.0], 0, kappa2, eta2, DEFAULT_CORE_GRID).unwrap();
        let tied = alloc.shots[1];
        assert!(alloc.shots[1..].iter().all(|&n| n == tied));
        // Minimal feasible count: variance at `tied` within threshold,
        // variance at `tied - 1` outside it.
        assert!(uniform_posterior_variance(eta2 / tied as f64, &params, 1) <= kappa2);
        assert!(uniform_posterior_variance(eta2 / (tied - 1) as f64, &params, 1) > kappa2);
        // No prior information to exploit: the center pays like the shifts.
        assert_eq!(alloc.shots[0], tied);
    }

    #[test]
    fn informed_center_is_skipped() {
        // Train tightly at the center first; stage 2 should then spend
        // nothing there while the shifts carry the load.
        let center = vec![0.5, 4.0];
        let params = KernelParams::new(1.0, 1.0, vec![1, 1]);
        let mut data = Dataset::new();
        for p in equidistant_line_points(&center, 0, 1) {
            data.push(&p, 0.1, 1e-6);
        }
        let model = GPModel::fit(data, params).unwrap();
        let kappa2 = 0.01;
        let alloc = choose_shots_center(&model, &center, 0, kappa2, 1.0, DEFAULT_CORE_GRID).unwrap();
        assert_eq!(alloc.shots[0], 0);
        assert!(alloc.variances[0].is_infinite());
        let bound = choose_shots_bound(&center, 0, kappa2, 1.0, 1);
        assert!(alloc.total_shots() < bound.total_shots());
    }

    #[test]
    fn generous_threshold_needs_almost_nothing() {
        let model = empty_model(vec![1]);
        let alloc = choose_shots_center(&model, &[0.0], 0, 2.0, 1.0, DEFAULT_CORE_GRID).unwrap();
        assert!(alloc.shots.iter().all(|&n| n <= 1));
        assert!(alloc.total_shots() >= 1);
    }

    #[test]
    fn center_never_exceeds_bound() {
        let mut data = Dataset::new();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        let params = KernelParams::new(3.0, 2.0, vec![1, 1, 1]);
        for _ in 0..20 {
            let p: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
            data.push(&p, rng.random_range(-2.0..2.0), rng.random_range(0.005..0.1));
        }
        let model = GPModel::fit(data, params).unwrap();
        for axis in 0..3 {
            let center: Vec<f64> =
                (0..3).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
            for kappa2 in [0.3, 0.03, 0.003] {
                let center_alloc =
                    choose_shots_center(&model, &center, axis, kappa2, 1.7, DEFAULT_CORE_GRID)
                        .unwrap();
                let bound_alloc = choose_shots_bound(&center, axis, kappa2, 1.7, 1);
                assert!(center_alloc.total_shots() <= bound_alloc.total_shots());
            }
        }
    }
}
