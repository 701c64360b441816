//! Analytic bounds, second-moment formulas for the training responses, and
//! the random packing construction.

pub mod bounds;
pub mod packing;

pub use bounds::{
    active_branch, branch_switch_shots, check_admissible, ideal_nfl_bound, nfl_bound_formal, nfl_bound_informal,
    ActiveBranch, BoundInput, DEFAULT_EPS_TILDE, DEFAULT_GAMMA, DEFAULT_LOG_MULTIPLIER,
};
pub use packing::{
    overlap_tail_bounds, packing_sample, packing_success_rate, packing_violations, projector_overlap_tail,
    PackingOutcome, TailEstimate,
};

use crate::error::{invalid, Result};

fn check_dims(d: usize, r: usize) -> Result<()> {
    if d < 2 {
        return Err(invalid("d", format!("need d >= 2, got {d}")));
    }
    if r == 0 || r > d {
        return Err(invalid("r", format!("need 1 <= r <= {d}, got {r}")));
    }
    Ok(())
}

/// Published closed form `(dr − 1)/(m r d (d+1))` of the per-example shot
/// variance. Exact only at `r = 1`; see [`exact_shot_variance`].
pub fn expected_shot_variance(d: usize, r: usize, m: u64) -> Result<f64> {
    check_dims(d, r)?;
    if m == 0 {
        return Err(invalid("m", "shot count must be positive"));
    }
    let (d, r, m) = (d as f64, r as f64, m as f64);
    Ok((d * r - 1.0) / (m * r * d * (d + 1.0)))
}

/// `E[u(1 − u)]/m` over random rank-r states and a fixed target:
/// `(rd + d − 2)/(m (r+1) d (d+1))`.
///
/// Follows from `E u = 1/d` and `E u² = (r+3)/((r+1)d(d+1))`.
pub fn exact_shot_variance(d: usize, r: usize, m: u64) -> Result<f64> {
    check_dims(d, r)?;
    if m == 0 {
        return Err(invalid("m", "shot count must be positive"));
    }
    let (d, r, m) = (d as f64, r as f64, m as f64);
    Ok((r * d + d - 2.0) / (m * (r + 1.0) * d * (d + 1.0)))
}

/// Published form `2ϱ²/(r+1) − (r−1)/((r+1)d(d²−1))` of the mean squared
/// response gap between two targets.
pub fn expected_mean_gap_sq(rho_metric: f64, d: usize, r: usize) -> Result<f64> {
    check_dims(d, r)?;
    if !(rho_metric >= 0.0) {
        return Err(invalid("rho_metric", format!("need rho >= 0, got {rho_metric}")));
    }
    let (d, r) = (d as f64, r as f64);
    Ok(2.0 * rho_metric * rho_metric / (r + 1.0) - (r - 1.0) / ((r + 1.0) * d * (d * d - 1.0)))
}

/// Exact `E(u_μ − u_ν)²` for targets at metric distance ϱ, where
/// `ϱ² = ‖|μ⟩⟨μ| − |ν⟩⟨ν|‖₂²/(d(d+1))`:
/// `ϱ² (2/(r+1) − (r−1)/((r+1)(d−1)))`.
pub fn exact_mean_gap_sq(rho_metric: f64, d: usize, r: usize) -> Result<f64> {
    check_dims(d, r)?;
    if !(rho_metric >= 0.0) {
        return Err(invalid("rho_metric", format!("need rho >= 0, got {rho_metric}")));
    }
    let (d, r) = (d as f64, r as f64);
    Ok(rho_metric * rho_metric * (2.0 / (r + 1.0) - (r - 1.0) / ((r + 1.0) * (d - 1.0))))
}

/// Metric distance ϱ between two pure targets with overlap `|⟨μ|ν⟩|²`.
pub fn rho_metric(overlap_sq: f64, d: usize) -> Result<f64> {
    crate::learner::risk_closed_form(overlap_sq, d).map(f64::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::PureState;
    use crate::dataset::{estimate_mean_gap, estimate_shot_variance};
    use crate::haar::haar_state;
    use crate::rng::SimRng;

    #[test]
    fn published_variance_examples() {
        assert!((expected_shot_variance(2, 1, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        for d in 2..=64usize {
            for r in 1..=d {
                assert!(expected_shot_variance(d, r, 1).unwrap() < 1.0 / d as f64);
                assert!(exact_shot_variance(d, r, 1).unwrap() < 1.0 / d as f64);
            }
        }
    }

    #[test]
    fn exact_and_published_variance_agree_at_rank_one() {
        for d in 2..=64 {
            let a = expected_shot_variance(d, 1, 3).unwrap();
            let b = exact_shot_variance(d, 1, 3).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_variance_matches_monte_carlo() {
        let mut rng = SimRng::new(21, 0);
        for (d, r) in [(2, 2), (4, 2), (8, 4)] {
            let t = haar_state(d, &mut rng).unwrap();
            let est = estimate_shot_variance(&t, r, 100_000, &mut rng).unwrap();
            assert!(est.within(exact_shot_variance(d, r, 1).unwrap(), 3.0), "d={d} r={r}: {est}");
        }
    }

    #[test]
    fn mean_gap_rank_one() {
        let rho = 0.3;
        assert!((expected_mean_gap_sq(rho, 8, 1).unwrap() - rho * rho).abs() < 1e-15);
        assert!((exact_mean_gap_sq(rho, 8, 1).unwrap() - rho * rho).abs() < 1e-15);
    }

    #[test]
    fn exact_mean_gap_matches_monte_carlo() {
        let mut rng = SimRng::new(22, 0);
        for (d, r) in [(4, 2), (8, 4)] {
            let mu = PureState::basis(d, 0).unwrap();
            let nu = PureState::basis(d, 1).unwrap();
            let rho = rho_metric(0.0, d).unwrap();
            let est = estimate_mean_gap(&mu, &nu, r, 100_000, &mut rng).unwrap();
            assert!(est.within(exact_mean_gap_sq(rho, d, r).unwrap(), 3.0), "d={d} r={r}: {est}");
        }
    }

    #[test]
    fn exact_mean_gap_for_non_orthogonal_targets() {
        let mut rng = SimRng::new(23, 0);
        let d = 4;
        let mu = haar_state(d, &mut rng).unwrap();
        let nu = haar_state(d, &mut rng).unwrap();
        let f = crate::complex::fidelity_pure(&mu, &nu).unwrap();
        let est = estimate_mean_gap(&mu, &nu, 3, 100_000, &mut rng).unwrap();
        let want = exact_mean_gap_sq(rho_metric(f, d).unwrap(), d, 3).unwrap();
        assert!(est.within(want, 3.0), "{est} vs {want}");
    }

    #[test]
    fn mean_gap_below_packing_bound() {
        let gamma = 4.0;
        for d in [2usize, 4, 16, 64] {
            for r in 1..=d {
                for eps in [1e-3, 1e-2, 0.05] {
                    let rho = 2.0 * gamma * eps;
                    let cap = 8.0 * gamma * gamma * eps * eps;
                    assert!(expected_mean_gap_sq(rho, d, r).unwrap() <= cap + 1e-15);
                    assert!(exact_mean_gap_sq(rho, d, r).unwrap() <= cap + 1e-15);
                }
            }
        }
    }
}
