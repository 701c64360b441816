//! Random local packings of pure states and the projector-overlap tail
//! estimates that justify them.

use rand::RngCore;

use crate::complex::{trace_distance_pure, PureState};
use crate::error::{invalid, Result};
use crate::haar::{haar_state, orthonormal_haar_family};
use crate::par;
use crate::rng::SimRng;
use crate::stats::{Estimate, MeanAccumulator};

/// Bins of the violating-distance histogram over [0, 2].
pub const HISTOGRAM_BINS: usize = 20;
/// Attempts evaluated per parallel batch.
const BATCH: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum PackingOutcome {
    Success {
        states: Vec<PureState>,
        /// Zero-based index of the attempt that succeeded.
        attempt: usize,
    },
    Failure {
        attempts: usize,
        /// Pairs closer than 2ε, summed over attempts.
        too_close: u64,
        /// Pairs farther than γε, summed over attempts.
        too_far: u64,
        /// Violating distances binned over [0, 2].
        histogram: Vec<u64>,
    },
}

impl PackingOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, PackingOutcome::Success { .. })
    }
}

struct Attempt {
    states: Vec<PureState>,
    too_close: u64,
    too_far: u64,
    histogram: Vec<u64>,
}

fn bin(dist: f64) -> usize {
    ((dist / 2.0 * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)
}

fn one_attempt(d: usize, lo: f64, hi: f64, l: usize, rng: &mut SimRng) -> Attempt {
    let states: Vec<PureState> = (0..l).map(|_| haar_state(d, rng).expect("d checked")).collect();
    let mut out = Attempt {
        states,
        too_close: 0,
        too_far: 0,
        histogram: vec![0; HISTOGRAM_BINS],
    };
    for i in 0..l {
        for j in i + 1..l {
            let dist = trace_distance_pure(&out.states[i], &out.states[j]).expect("same dim");
            if dist < lo {
                out.too_close += 1;
            } else if dist > hi {
                out.too_far += 1;
            } else {
                continue;
            }
            out.histogram[bin(dist)] += 1;
        }
    }
    out
}

/// Draws L Haar states per attempt until every pairwise trace distance lies
/// in `[2ε, γε]`.
///
/// Attempt `i` uses its own stream, so the first successful index does not
/// depend on the worker count.
pub fn packing_sample(
    d: usize,
    eps: f64,
    gamma: f64,
    l: usize,
    max_attempts: usize,
    rng: &mut SimRng,
) -> Result<PackingOutcome> {
    if d == 0 {
        return Err(invalid("d", "dimension must be positive"));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("need eps > 0, got {eps}")));
    }
    if !(gamma > 2.0) {
        return Err(invalid("gamma", format!("need gamma > 2, got {gamma}")));
    }
    if l < 2 {
        return Err(invalid("L", format!("need L >= 2, got {l}")));
    }
    let (lo, hi) = (2.0 * eps, gamma * eps);
    let mut failure = PackingOutcome::Failure {
        attempts: 0,
        too_close: 0,
        too_far: 0,
        histogram: vec![0; HISTOGRAM_BINS],
    };
    // pure-state trace distances never exceed 2
    if lo > 2.0 {
        return Ok(failure);
    }
    let base = rng.split();
    let mut start = 0;
    while start < max_attempts {
        let len = BATCH.min(max_attempts - start);
        let batch = par::map_range(len, |i| {
            let mut child = base.fork((start + i) as u64);
            one_attempt(d, lo, hi, l, &mut child)
        });
        for (i, a) in batch.into_iter().enumerate() {
            if a.too_close == 0 && a.too_far == 0 {
                return Ok(PackingOutcome::Success {
                    states: a.states,
                    attempt: start + i,
                });
            }
            if let PackingOutcome::Failure {
                attempts,
                too_close,
                too_far,
                histogram,
            } = &mut failure
            {
                *attempts += 1;
                *too_close += a.too_close;
                *too_far += a.too_far;
                for (h, x) in histogram.iter_mut().zip(&a.histogram) {
                    *h += x;
                }
            }
        }
        start += len;
    }
    Ok(failure)
}

/// Pairs of `states` whose trace distance falls outside `[2ε, γε]`.
pub fn packing_violations(states: &[PureState], eps: f64, gamma: f64) -> Result<Vec<(usize, usize, f64)>> {
    let mut out = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let dist = trace_distance_pure(&states[i], &states[j])?;
            if dist < 2.0 * eps || dist > gamma * eps {
                out.push((i, j, dist));
            }
        }
    }
    Ok(out)
}

/// Empirical tail probabilities of `Tr(Π₁ W Π₂ W†)` around `r₁r₂/d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate {
    /// P[X ≤ (1 − t) r₁r₂/d]
    pub lower: Estimate,
    /// P[X ≥ (1 + t) r₁r₂/d]
    pub upper: Estimate,
    /// Mean of X; should approach r₁r₂/d.
    pub mean: Estimate,
}

/// `exp(−r₁r₂t²/2)` and `exp(−r₁r₂t²/4)`.
pub fn overlap_tail_bounds(r1: usize, r2: usize, t: f64) -> (f64, f64) {
    let k = (r1 * r2) as f64 * t * t;
    ((-k / 2.0).exp(), (-k / 4.0).exp())
}

/// Monte-Carlo tails of the overlap between two coordinate projectors of
/// ranks `r1`, `r2` after a Haar rotation.
pub fn projector_overlap_tail(
    d: usize,
    r1: usize,
    r2: usize,
    t: f64,
    samples: u64,
    rng: &mut SimRng,
) -> Result<TailEstimate> {
    if d == 0 || r1 == 0 || r2 == 0 || r1 > d || r2 > d {
        return Err(invalid("r", format!("need 1 <= r1, r2 <= d = {d}, got ({r1}, {r2})")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(invalid("t", format!("need t in (0, 1), got {t}")));
    }
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    let centre = (r1 * r2) as f64 / d as f64;
    let (lo, hi) = ((1.0 - t) * centre, (1.0 + t) * centre);
    let est = par::monte_carlo_multi(samples, 3, rng, |g, out| {
        // the first r2 columns of W are all that Π₂ keeps
        let cols = orthonormal_haar_family(d, r2, g).expect("ranks checked");
        let x: f64 = cols
            .iter()
            .map(|c| c.amplitudes()[..r1].iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum();
        out[0] = f64::from(u8::from(x <= lo));
        out[1] = f64::from(u8::from(x >= hi));
        out[2] = x;
    });
    Ok(TailEstimate {
        lower: est[0],
        upper: est[1],
        mean: est[2],
    })
}

/// Success frequency of single-attempt packings over `runs` independent runs.
pub fn packing_success_rate(d: usize, eps: f64, gamma: f64, l: usize, runs: usize, rng: &mut SimRng) -> Result<Estimate> {
    let key = rng.next_u64();
    let base = SimRng::derive(key, &[d as u64, l as u64]);
    let outcomes = par::map_range(runs, |i| {
        let mut g = base.fork(i as u64);
        packing_sample(d, eps, gamma, l, 1, &mut g).map(|o| o.is_success())
    });
    let mut acc = MeanAccumulator::new();
    for o in outcomes {
        acc.push(f64::from(u8::from(o?)));
    }
    Ok(acc.estimate())
}
