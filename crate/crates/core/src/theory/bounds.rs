//! Lower-bound evaluators for the averaged risk.

use crate::error::{invalid, Result};
use crate::learner::Shots;

/// Default rescaled packing radius; midpoint of the admissible interval at γ = 4.
pub const DEFAULT_EPS_TILDE: f64 = 0.15;
pub const DEFAULT_GAMMA: f64 = 4.0;
pub const DEFAULT_LOG_MULTIPLIER: f64 = 1.0;
/// Additive constant `16·log₂ 2` in the numerator of the formal bound.
const ADDITIVE: f64 = 16.0;

/// Parameters of the no-free-lunch lower bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInput {
    pub d: usize,
    pub train_size: usize,
    pub shots: Shots,
    pub rank: usize,
    pub eps_tilde: f64,
    pub gamma: f64,
    /// Multiplier on the `r·log₂ d` branch (1 or 16).
    pub log_multiplier: f64,
}

impl BoundInput {
    pub fn new(d: usize, train_size: usize, shots: Shots, rank: usize) -> Self {
        BoundInput {
            d,
            train_size,
            shots,
            rank,
            eps_tilde: DEFAULT_EPS_TILDE,
            gamma: DEFAULT_GAMMA,
            log_multiplier: DEFAULT_LOG_MULTIPLIER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(invalid("d", format!("need d >= 2, got {}", self.d)));
        }
        if self.rank == 0 || self.rank > self.d {
            return Err(invalid("r", format!("need 1 <= r <= {}, got {}", self.d, self.rank)));
        }
        if self.shots == Shots::Finite(0) {
            return Err(invalid("m", "shot count must be positive"));
        }
        if !(self.log_multiplier > 0.0) || !self.log_multiplier.is_finite() {
            return Err(invalid("log_multiplier", "must be positive and finite"));
        }
        check_admissible(self.eps_tilde, self.gamma)
    }

    /// `c₂ = min{(1 − 2ε̃)², (4γ²ε̃² − 1)²}`.
    pub fn c2(&self) -> f64 {
        c2(self.eps_tilde, self.gamma)
    }
}

/// γ > 2 and 0 < 4γ²ε̃² − 1 < 1.
pub fn check_admissible(eps_tilde: f64, gamma: f64) -> Result<()> {
    if !(gamma > 2.0) || !gamma.is_finite() {
        return Err(invalid("gamma", format!("need gamma > 2, got {gamma}")));
    }
    let s = 4.0 * gamma * gamma * eps_tilde * eps_tilde - 1.0;
    if !(eps_tilde > 0.0) || !(s > 0.0 && s < 1.0) {
        let lo = 1.0 / (2.0 * gamma);
        let hi = std::f64::consts::SQRT_2 / (2.0 * gamma);
        return Err(invalid(
            "eps_tilde",
            format!("{eps_tilde} outside the admissible interval ({lo}, {hi}) for gamma = {gamma}"),
        ));
    }
    Ok(())
}

fn c2(eps_tilde: f64, gamma: f64) -> f64 {
    let a = (1.0 - 2.0 * eps_tilde).powi(2);
    let b = (4.0 * gamma * gamma * eps_tilde * eps_tilde - 1.0).powi(2);
    a.min(b)
}

fn m_branch(b: &BoundInput) -> f64 {
    let (d, r) = (b.d as f64, b.rank as f64);
    8.0 * b.gamma * b.gamma * b.shots.as_f64() * b.eps_tilde * b.eps_tilde / (r * (d + 1.0))
}

fn log_branch(b: &BoundInput) -> f64 {
    b.log_multiplier * b.rank as f64 * (b.d as f64).log2()
}

/// Which argument of the formal bound's `min` is active.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActiveBranch {
    Shots,
    RankLog,
}

pub fn active_branch(b: &BoundInput) -> ActiveBranch {
    if m_branch(b) <= log_branch(b) {
        ActiveBranch::Shots
    } else {
        ActiveBranch::RankLog
    }
}

/// Formal bound, clamped at 0.
pub fn nfl_bound_formal(b: &BoundInput) -> Result<f64> {
    b.validate()?;
    let d = b.d as f64;
    let eps2 = b.eps_tilde * b.eps_tilde;
    let info = m_branch(b).min(log_branch(b));
    let frac = (b.train_size as f64 * info + ADDITIVE) / (d * b.c2());
    Ok((eps2 / (8.0 * d * (d + 1.0)) * (1.0 - frac)).max(0.0))
}

/// Shot count at which the two `min` arguments of the formal bound coincide.
pub fn branch_switch_shots(b: &BoundInput) -> Result<f64> {
    b.validate()?;
    let (d, r) = (b.d as f64, b.rank as f64);
    Ok(b.log_multiplier * r * r * (d + 1.0) * d.log2() / (8.0 * b.gamma * b.gamma * b.eps_tilde * b.eps_tilde))
}

/// Informal bound evaluated with hidden constant 1 (γ = 4), clamped at 0.
pub fn nfl_bound_informal(n_qubits: u32, train_size: usize, shots: Shots, rank: usize, eps_tilde: f64) -> Result<f64> {
    if n_qubits == 0 || n_qubits > 30 {
        return Err(invalid("n", format!("need 1 <= n <= 30, got {n_qubits}")));
    }
    let d = (1u64 << n_qubits) as f64;
    if rank == 0 || rank as f64 > d {
        return Err(invalid("r", format!("need 1 <= r <= {d}, got {rank}")));
    }
    if shots == Shots::Finite(0) {
        return Err(invalid("m", "shot count must be positive"));
    }
    check_admissible(eps_tilde, DEFAULT_GAMMA)?;
    let eps2 = eps_tilde * eps_tilde;
    let c1 = 128.0 * (d + 1.0) / eps2;
    let c2 = c2(eps_tilde, DEFAULT_GAMMA);
    let r = rank as f64;
    let info = (shots.as_f64() / (r * c1)).min(r * n_qubits as f64);
    let frac = train_size as f64 * info / (d * c2);
    Ok((eps2 / (d * d) * (1.0 - frac)).max(0.0))
}

/// Ideal-setting bound `max(0, 1 − (d + r²N²)/(d(d+1)))`.
pub fn ideal_nfl_bound(d: usize, rank: usize, train_size: usize) -> Result<f64> {
    if d == 0 {
        return Err(invalid("d", "dimension must be positive"));
    }
    if rank == 0 {
        return Err(invalid("r", "rank must be positive"));
    }
    if train_size == 0 {
        return Err(invalid("N", "need at least one training example"));
    }
    let df = d as f64;
    let rn = (rank * train_size) as f64;
    Ok((1.0 - (df + rn * rn) / (df * (df + 1.0))).max(0.0))
}
