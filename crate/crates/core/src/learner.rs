//! Finite-shot measurement, the argmin hypothesis-testing learner over the
//! computational-basis target set, and the prediction risk.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::complex::{fidelity_pure, PureState, MAX_DIM};
use crate::dataset::{sample_diagonal_state, sample_orthogonal_family, DiagonalState};
use crate::error::{invalid, Error, Result};
use crate::haar::haar_state;
use crate::par;
use crate::rng::SimRng;
use crate::stats::Estimate;

/// Scores within this distance of the minimum count as ties.
pub const TIE_TOL: f64 = 1e-12;

/// Number of measurement shots behind one response; `Infinite` means the
/// exact expectation value is observed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shots {
    Finite(u64),
    Infinite,
}

impl Shots {
    /// Stable integer code used in stream keys; `u64::MAX` for `Infinite`.
    pub fn key(self) -> u64 {
        match self {
            Shots::Finite(m) => m,
            Shots::Infinite => u64::MAX,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Shots::Finite(m) => m as f64,
            Shots::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Finite(m) => write!(f, "{m}"),
            Shots::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "inf" | "Inf" | "INF" | "infinity" | "∞" => Ok(Shots::Infinite),
            _ => {
                let m: u64 = t
                    .parse()
                    .map_err(|_| invalid("m", format!("`{t}` is neither a shot count nor `inf`")))?;
                if m == 0 {
                    return Err(invalid("m", "shot count must be positive"));
                }
                Ok(Shots::Finite(m))
            }
        }
    }
}

impl Serialize for Shots {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Shots::Finite(m) => serializer.serialize_u64(*m),
            Shots::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(0) => Err(serde::de::Error::custom("shot count must be positive")),
            Raw::Int(m) => Ok(Shots::Finite(m)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Mean of `m` Bernoulli(u) outcomes, sampled exactly as Binomial(m, u)/m.
///
/// Values within 1e-12 outside `[0, 1]` are treated as rounding and clamped.
pub fn measure_mean(u: f64, m: Shots, rng: &mut SimRng) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return Err(invalid("u", format!("expectation {u} outside [0, 1]")));
    }
    let u = u.clamp(0.0, 1.0);
    match m {
        Shots::Infinite => Ok(u),
        Shots::Finite(0) => Err(invalid("m", "shot count must be positive")),
        Shots::Finite(_) if u == 0.0 || u == 1.0 => Ok(u),
        Shots::Finite(m) => {
            let dist = Binomial::new(m, u).map_err(|e| invalid("u", e.to_string()))?;
            Ok(dist.sample(rng) as f64 / m as f64)
        }
    }
}

/// `argmin_k Σ_j (o_j^(k) − o_j)²` with uniform random tie-breaking.
///
/// `candidate_responses[k]` holds the `N` responses predicted by candidate `k`.
pub fn learn_index(target_responses: &[f64], candidate_responses: &[Vec<f64>], rng: &mut SimRng) -> Result<usize> {
    if target_responses.is_empty() {
        return Err(Error::EmptyInput("target responses"));
    }
    if candidate_responses.is_empty() {
        return Err(Error::EmptyInput("candidate responses"));
    }
    let scores: Vec<f64> = candidate_responses
        .iter()
        .map(|row| {
            if row.len() != target_responses.len() {
                return Err(Error::DimensionMismatch {
                    context: "candidate response count",
                    expected: target_responses.len(),
                    found: row.len(),
                });
            }
            Ok(row
                .iter()
                .zip(target_responses)
                .map(|(a, b)| (a - b) * (a - b))
                .sum())
        })
        .collect::<Result<_>>()?;
    let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let ties: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= best + TIE_TOL)
        .map(|(k, _)| k)
        .collect();
    Ok(if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.random_range(0..ties.len())]
    })
}

/// Parameters of one learning trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrialConfig {
    pub n_qubits: u32,
    pub rank: usize,
    pub shots: Shots,
    pub train_size: usize,
    /// Use pairwise-orthogonal training states (requires `rank * train_size <= d`).
    pub ortho: bool,
    /// Shots behind each candidate response; defaults to `shots`.
    pub candidate_shots: Shots,
}

impl TrialConfig {
    pub fn new(n_qubits: u32, rank: usize, shots: Shots, train_size: usize, ortho: bool) -> Self {
        TrialConfig {
            n_qubits,
            rank,
            shots,
            train_size,
            ortho,
            candidate_shots: shots,
        }
    }

    pub fn with_candidate_shots(mut self, candidate_shots: Shots) -> Self {
        self.candidate_shots = candidate_shots;
        self
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || (1usize << self.n_qubits.min(63)) > MAX_DIM {
            return Err(invalid("n", format!("need 1 <= n <= 8, got {}", self.n_qubits)));
        }
        let d = self.dim();
        if self.rank == 0 || self.rank > d {
            return Err(invalid("r", format!("need 1 <= r <= {d}, got {}", self.rank)));
        }
        if self.train_size == 0 {
            return Err(invalid("N", "need at least one training example"));
        }
        if self.ortho && self.rank * self.train_size > d {
            return Err(invalid(
                "N",
                format!("orthogonal family needs r * N <= {d}, got {} * {}", self.rank, self.train_size),
            ));
        }
        for m in [self.shots, self.candidate_shots] {
            if m == Shots::Finite(0) {
                return Err(invalid("m", "shot count must be positive"));
            }
        }
        Ok(())
    }
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub config: TrialConfig,
    pub trial_u: u32,
    pub trial_d: u32,
    pub k_star: usize,
    pub k_hat: usize,
    pub error_indicator: u8,
    pub risk: f64,
    pub normalized_error: f64,
    pub seed_hash: u64,
}

/// Risk `(2/(d(d+1)))(1 − |⟨μ|ν⟩|²)` of a learned state against the target.
pub fn risk_closed_form(overlap_sq: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap_sq) {
        return Err(invalid("overlap_sq", format!("{overlap_sq} outside [0, 1]")));
    }
    if d == 0 {
        return Err(invalid("d", "dimension must be positive"));
    }
    let df = d as f64;
    Ok(2.0 / (df * (df + 1.0)) * (1.0 - overlap_sq))
}

/// Multiplier turning a risk value into the plotted "normalized error".
pub fn normalization(d: usize) -> f64 {
    (d * d) as f64 / 2.0
}

/// Haar average of `(|⟨u|φ⟩|² − |⟨v|φ⟩|²)²`, with `u = U†|o⟩`, `v = V†|o⟩`.
pub fn risk_monte_carlo(u_target: &PureState, v_learned: &PureState, samples: u64, rng: &mut SimRng) -> Result<Estimate> {
    let d = u_target.dim();
    if v_learned.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "risk state dimension",
            expected: d,
            found: v_learned.dim(),
        });
    }
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    if u_target == v_learned {
        return Ok(Estimate {
            mean: 0.0,
            stderr: 0.0,
            samples,
        });
    }
    Ok(par::monte_carlo(samples, rng, |g| {
        let phi = haar_state(d, g).expect("dimension checked");
        let gap = u_target.overlap_sq_unchecked(&phi) - v_learned.overlap_sq_unchecked(&phi);
        gap * gap
    }))
}

/// Closed-form risk between two pure states.
pub fn risk_between(u_target: &PureState, v_learned: &PureState) -> Result<f64> {
    risk_closed_form(fidelity_pure(u_target, v_learned)?, u_target.dim())
}

/// Draws the target index uniformly, then runs [`run_trial_with_target`].
pub fn run_trial(cfg: &TrialConfig, rng: &mut SimRng) -> Result<TrialRecord> {
    cfg.validate()?;
    let k_star = rng.random_range(0..cfg.dim());
    run_trial_with_target(cfg, k_star, rng)
}

/// One trial against target `|e_{k_star}⟩⟨e_{k_star}|`.
pub fn run_trial_with_target(cfg: &TrialConfig, k_star: usize, rng: &mut SimRng) -> Result<TrialRecord> {
    cfg.validate()?;
    let d = cfg.dim();
    if k_star >= d {
        return Err(invalid("k_star", format!("target index {k_star} out of range for d = {d}")));
    }
    let states: Vec<DiagonalState> = if cfg.ortho {
        sample_orthogonal_family(d, cfg.rank, cfg.train_size, rng)?
    } else {
        (0..cfg.train_size)
            .map(|_| sample_diagonal_state(d, cfg.rank, rng))
            .collect::<Result<_>>()?
    };

    let targets: Vec<f64> = states
        .iter()
        .map(|s| measure_mean(s.weight_at(k_star), cfg.shots, rng))
        .collect::<Result<_>>()?;
    let candidates: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            states
                .iter()
                .map(|s| measure_mean(s.weight_at(k), cfg.candidate_shots, rng))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let k_hat = learn_index(&targets, &candidates, rng)?;

    let error_indicator = u8::from(k_hat != k_star);
    let risk = risk_closed_form(if error_indicator == 1 { 0.0 } else { 1.0 }, d)?;
    Ok(TrialRecord {
        config: *cfg,
        trial_u: 0,
        trial_d: 0,
        k_star,
        k_hat,
        error_indicator,
        risk,
        normalized_error: risk * normalization(d),
        seed_hash: rng.stream(),
    })
}
