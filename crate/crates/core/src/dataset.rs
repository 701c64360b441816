//! Entangled training inputs.
//!
//! A training input is a Schmidt-rank-`r` state
//! `|ψ⟩ = Σ_k √c_k |ξ_k⟩|ζ_k⟩`. The learner only ever sees its reduced state
//! on the system, `Σ_k c_k |ξ_k⟩⟨ξ_k|`; [`DiagonalState`] is the special case
//! where the `ξ_k` are computational basis vectors, which is what the
//! simulation sweeps use.

use crate::complex::{partial_trace_reference, CMatrix, PureState, C64, ALGEBRAIC_TOL};
use crate::error::{invalid, Error, Result};
use crate::haar::{haar_probability_vector, orthonormal_haar_family, random_permutation_prefix};
use crate::learner::Shots;
use crate::par;
use crate::rng::SimRng;
use crate::stats::Estimate;

const WEIGHT_TOL: f64 = 1e-12;

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::EmptyInput("Schmidt weights"));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(invalid("weights", "weights must be nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(invalid("weights", format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

fn check_orthonormal(name: &'static str, family: &[PureState], d: usize) -> Result<()> {
    for (i, a) in family.iter().enumerate() {
        if a.dim() != d {
            return Err(Error::DimensionMismatch {
                context: "Schmidt vector dimension",
                expected: d,
                found: a.dim(),
            });
        }
        for b in &family[..i] {
            let g = a.inner(b)?.norm();
            if g > ALGEBRAIC_TOL {
                return Err(invalid(name, format!("vectors not orthogonal (|⟨a|b⟩| = {g:e})")));
            }
        }
    }
    Ok(())
}

/// Bipartite pure state in Schmidt form.
#[derive(Clone, Debug, PartialEq)]
pub struct EntangledState {
    d: usize,
    weights: Vec<f64>,
    xi: Vec<PureState>,
    zeta: Vec<PureState>,
}

impl EntangledState {
    pub fn new(d: usize, weights: Vec<f64>, xi: Vec<PureState>, zeta: Vec<PureState>) -> Result<Self> {
        check_weights(&weights)?;
        let r = weights.len();
        if r > d {
            return Err(invalid("r", format!("Schmidt rank {r} exceeds d = {d}")));
        }
        if xi.len() != r || zeta.len() != r {
            return Err(Error::DimensionMismatch {
                context: "Schmidt vector count",
                expected: r,
                found: if xi.len() != r { xi.len() } else { zeta.len() },
            });
        }
        check_orthonormal("xi", &xi, d)?;
        check_orthonormal("zeta", &zeta, d)?;
        Ok(EntangledState { d, weights, xi, zeta })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn system_vectors(&self) -> &[PureState] {
        &self.xi
    }

    pub fn reference_vectors(&self) -> &[PureState] {
        &self.zeta
    }

    /// The joint vector on system ⊗ reference, indexed `x * d + r`.
    pub fn assemble(&self) -> PureState {
        let d = self.d;
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        for ((c, xi), zeta) in self.weights.iter().zip(&self.xi).zip(&self.zeta) {
            let s = c.sqrt();
            for (x, a) in xi.amplitudes().iter().enumerate() {
                for (r, b) in zeta.amplitudes().iter().enumerate() {
                    amps[x * d + r] += a * b * s;
                }
            }
        }
        PureState::normalized(amps).expect("Schmidt form has unit norm")
    }

    /// `Σ_k c_k |ξ_k⟩⟨ξ_k|`, assembled from the Schmidt data.
    pub fn reduced_state(&self) -> CMatrix {
        let d = self.d;
        let mut rho = CMatrix::zeros(d, d);
        for (c, xi) in self.weights.iter().zip(&self.xi) {
            let a = xi.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    rho[(i, j)] += a[i] * a[j].conj() * *c;
                }
            }
        }
        rho
    }

    /// Reduced state through the composite vector and an explicit partial trace.
    pub fn reduced_state_via_partial_trace(&self) -> CMatrix {
        partial_trace_reference(&self.assemble(), self.d).expect("composite is d x d")
    }
}

/// Reduced state `Σ_k c_k |e_{s_k}⟩⟨e_{s_k}|` supported on distinct basis indices.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalState {
    d: usize,
    support: Vec<usize>,
    weights: Vec<f64>,
}

impl DiagonalState {
    pub fn new(d: usize, support: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        if support.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                context: "support length",
                expected: weights.len(),
                found: support.len(),
            });
        }
        for (i, &s) in support.iter().enumerate() {
            if s >= d {
                return Err(invalid("support", format!("index {s} out of range for d = {d}")));
            }
            if support[..i].contains(&s) {
                return Err(invalid("support", format!("index {s} repeated")));
            }
        }
        Ok(DiagonalState { d, support, weights })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn weight_at(&self, k: usize) -> f64 {
        self.support
            .iter()
            .position(|&s| s == k)
            .map_or(0.0, |i| self.weights[i])
    }

    /// The same state in Schmidt form with basis vectors on both sides.
    pub fn to_entangled(&self) -> EntangledState {
        let xi: Vec<PureState> = self
            .support
            .iter()
            .map(|&s| PureState::basis(self.d, s).expect("support index in range"))
            .collect();
        let zeta: Vec<PureState> = (0..self.rank())
            .map(|k| PureState::basis(self.d, k).expect("rank <= d"))
            .collect();
        EntangledState::new(self.d, self.weights.clone(), xi, zeta).expect("valid Schmidt data")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainingState {
    Diagonal(DiagonalState),
    Entangled(EntangledState),
}

/// One training pair: an input state and its measured response.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingExample {
    pub state: TrainingState,
    pub response: f64,
    pub shots: Shots,
}

impl TrainingExample {
    pub fn new(state: TrainingState, response: f64, shots: Shots) -> Result<Self> {
        if !(0.0..=1.0).contains(&response) {
            return Err(invalid("response", format!("{response} outside [0, 1]")));
        }
        if let Shots::Finite(m) = shots {
            let k = response * m as f64;
            if (k - k.round()).abs() > 1e-9 * m as f64 {
                return Err(invalid("response", format!("{response} is not a multiple of 1/{m}")));
            }
        }
        Ok(TrainingExample {
            state,
            response,
            shots,
        })
    }
}

fn check_rank(d: usize, r: usize) -> Result<()> {
    if r == 0 || r > d {
        return Err(invalid("r", format!("need 1 <= r <= d = {d}, got {r}")));
    }
    Ok(())
}

/// Independent weights, system family and reference family.
pub fn sample_entangled_general(d: usize, r: usize, rng: &mut SimRng) -> Result<EntangledState> {
    check_rank(d, r)?;
    let weights = haar_probability_vector(r, rng)?;
    let xi = orthonormal_haar_family(d, r, rng)?;
    let zeta = orthonormal_haar_family(d, r, rng)?;
    Ok(EntangledState { d, weights, xi, zeta })
}

/// Support = first `r` entries of a uniform permutation of `0..d`.
pub fn sample_diagonal_state(d: usize, r: usize, rng: &mut SimRng) -> Result<DiagonalState> {
    check_rank(d, r)?;
    let support = random_permutation_prefix(d, r, rng);
    let weights = haar_probability_vector(r, rng)?;
    Ok(DiagonalState { d, support, weights })
}

/// `n` diagonal states with pairwise disjoint supports cut from one permutation.
pub fn sample_orthogonal_family(d: usize, r: usize, n: usize, rng: &mut SimRng) -> Result<Vec<DiagonalState>> {
    check_rank(d, r)?;
    if n == 0 {
        return Err(invalid("N", "need at least one state"));
    }
    if r.checked_mul(n).is_none_or(|rn| rn > d) {
        return Err(invalid("N", format!("r * N = {r} * {n} exceeds d = {d}")));
    }
    let perm = random_permutation_prefix(d, r * n, rng);
    perm.chunks(r)
        .map(|slot| {
            let weights = haar_probability_vector(r, rng)?;
            Ok(DiagonalState {
                d,
                support: slot.to_vec(),
                weights,
            })
        })
        .collect()
}

/// `Tr(σ |e_k⟩⟨e_k|)`.
pub fn expectation_diagonal(s: &DiagonalState, k: usize) -> Result<f64> {
    if k >= s.d {
        return Err(invalid("k", format!("index {k} out of range for d = {}", s.d)));
    }
    Ok(s.weight_at(k))
}

/// `Σ_k c_k |⟨target|ξ_k⟩|²`.
pub fn expectation_general(s: &EntangledState, target: &PureState) -> Result<f64> {
    if target.dim() != s.d {
        return Err(Error::DimensionMismatch {
            context: "target dimension",
            expected: s.d,
            found: target.dim(),
        });
    }
    let u: f64 = s
        .weights
        .iter()
        .zip(&s.xi)
        .map(|(c, xi)| c * target.overlap_sq_unchecked(xi))
        .sum();
    Ok(u.clamp(0.0, 1.0))
}

/// Monte-Carlo estimate of `E[u(1-u)]` for `u = expectation_general(ψ, target)`
/// over general rank-`r` samples.
pub fn estimate_shot_variance(target: &PureState, r: usize, samples: u64, rng: &mut SimRng) -> Result<Estimate> {
    let d = target.dim();
    check_rank(d, r)?;
    Ok(par::monte_carlo(samples, rng, |g| {
        let s = sample_entangled_general(d, r, g).expect("checked rank");
        let u = expectation_general(&s, target).expect("matching dimension");
        u * (1.0 - u)
    }))
}

/// Monte-Carlo estimate of `E[(u_μ − u_ν)²]` over general rank-`r` samples.
pub fn estimate_mean_gap(mu: &PureState, nu: &PureState, r: usize, samples: u64, rng: &mut SimRng) -> Result<Estimate> {
    let d = mu.dim();
    if nu.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "target pair dimension",
            expected: d,
            found: nu.dim(),
        });
    }
    check_rank(d, r)?;
    Ok(par::monte_carlo(samples, rng, |g| {
        let s = sample_entangled_general(d, r, g).expect("checked rank");
        let gap = expectation_general(&s, mu).expect("dim") - expectation_general(&s, nu).expect("dim");
        gap * gap
    }))
}
