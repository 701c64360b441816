//! Monte-Carlo verification suites: each check compares an estimate with its
//! closed form and passes when the gap is within three standard errors.

use std::fmt;
use std::str::FromStr;

use crate::complex::{fidelity_pure, CMatrix, PureState, C64};
use crate::dataset::{
    estimate_mean_gap, estimate_shot_variance, expectation_general, sample_diagonal_state, sample_entangled_general,
    sample_orthogonal_family,
};
use crate::error::{invalid, Error, Result};
use crate::haar::{analytic_moment, estimate_moment, estimate_state_frame, ginibre, haar_state, MomentKind};
use crate::learner::{risk_closed_form, risk_monte_carlo};
use crate::par;
use crate::rng::{hash_key, SimRng};
use crate::stats::{familywise_band, Estimate, MeanAccumulator};
use crate::theory::{
    exact_mean_gap_sq, exact_shot_variance, expected_mean_gap_sq, expected_shot_variance, overlap_tail_bounds,
    packing_sample, packing_success_rate, packing_violations, projector_overlap_tail, rho_metric, PackingOutcome,
};

/// Width of the acceptance band, in standard errors.
pub const BAND: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}/{}: {}", self.suite, self.name, self.detail)
    }
}

fn estimate_check(suite: &'static str, name: String, est: &Estimate, target: f64) -> CheckResult {
    CheckResult {
        suite,
        name,
        passed: est.within(target, BAND),
        detail: format!("{est} vs {target:.6e} (z = {:.2})", est.z_score(target)),
    }
}

fn exact_check(suite: &'static str, name: String, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        suite,
        name,
        passed,
        detail,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Haar,
    Dataset,
    Risk,
    Variance,
    MeanGap,
    Packing,
    Concentration,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Haar,
        Suite::Dataset,
        Suite::Risk,
        Suite::Variance,
        Suite::MeanGap,
        Suite::Packing,
        Suite::Concentration,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Haar => "haar",
            Suite::Dataset => "dataset",
            Suite::Risk => "risk",
            Suite::Variance => "variance",
            Suite::MeanGap => "meangap",
            Suite::Packing => "packing",
            Suite::Concentration => "concentration",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| invalid("suite", format!("unknown suite `{s}`")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Runs `suite` with `samples` Monte-Carlo draws per check.
pub fn run_suite(suite: Suite, samples: u64, seed: u64) -> Result<Vec<CheckResult>> {
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    let mut rng = SimRng::derive(seed, &[hash_key(&[suite as u64])]);
    match suite {
        Suite::Haar => haar_checks(&[2, 4, 8], samples, &mut rng),
        Suite::Dataset => dataset_checks(samples, &mut rng),
        Suite::Risk => risk_checks(&[2, 4, 8], 5, samples, &mut rng),
        Suite::Variance => variance_checks(&[(4, 1), (4, 2), (8, 4)], samples, &mut rng),
        Suite::MeanGap => mean_gap_checks(&[(4, 2), (8, 4)], samples, &mut rng),
        Suite::Packing => packing_checks(&mut rng),
        Suite::Concentration => concentration_checks(32, &[1, 2, 3, 4], &[0.3, 0.5], samples, &mut rng),
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, samples, seed)?);
            }
            Ok(out)
        }
    }
}

fn traceless(a: &CMatrix) -> CMatrix {
    let d = a.rows();
    let shift = a.trace() / d as f64;
    a.sub(&CMatrix::identity(d).scale(shift)).expect("square")
}

fn hermitian_part(a: &CMatrix) -> CMatrix {
    a.add(&a.adjoint()).expect("square").scale(C64::new(0.5, 0.0))
}

fn moment_check(kind: MomentKind, label: &str, ops: &[CMatrix], d: usize, samples: u64, rng: &mut SimRng) -> Result<CheckResult> {
    let target = analytic_moment(kind, ops, d)?
        .scalar()
        .expect("scalar-valued moment");
    let est = estimate_moment(kind, ops, d, samples, rng)?;
    Ok(exact_check(
        "haar",
        format!("{kind}/{label} d={d}"),
        est.within(target, BAND),
        format!(
            "re {} im {} vs {:.6e}{:+.6e}i (max z = {:.2})",
            est.re,
            est.im,
            target.re,
            target.im,
            est.max_z_score(target)
        ),
    ))
}

/// Every Haar moment identity at each dimension in `dims`.
pub fn haar_checks(dims: &[usize], samples: u64, rng: &mut SimRng) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for &d in dims {
        let generic: Vec<CMatrix> = (0..4).map(|_| ginibre(d, d, rng)).collect();
        let zero_trace: Vec<CMatrix> = generic.iter().map(traceless).collect();
        let herm_traceless = hermitian_part(&zero_trace[0]);
        let herm = hermitian_part(&generic[0]);

        out.push(moment_check(MomentKind::Conj1, "generic", &generic[..2], d, samples, rng)?);
        out.push(moment_check(MomentKind::Conj1, "traceless", &zero_trace[..2], d, samples, rng)?);
        if d >= 2 {
            out.push(moment_check(MomentKind::Conj2, "generic", &generic, d, samples, rng)?);
        }
        out.push(moment_check(MomentKind::State1, "generic", &generic[..1], d, samples, rng)?);
        out.push(moment_check(MomentKind::State2, "generic", &generic[..2], d, samples, rng)?);
        if d >= 2 {
            out.push(moment_check(MomentKind::OrthPair, "traceless", &[herm_traceless], d, samples, rng)?);
            out.push(moment_check(MomentKind::OrthPair, "hermitian", &[herm], d, samples, rng)?);
        }

        // a trace-one Hermitian matrix has d² − 1 free real entries
        let band = familywise_band(BAND, d * d - 1);
        let frame = estimate_state_frame(d, samples, rng)?;
        let mut worst = 0.0f64;
        let mut passed = true;
        for (idx, e) in frame.iter().enumerate() {
            let target = if idx / d == idx % d { C64::new(1.0 / d as f64, 0.0) } else { C64::new(0.0, 0.0) };
            passed &= e.within(target, band);
            worst = worst.max(e.max_z_score(target));
        }
        out.push(exact_check(
            "haar",
            format!("state1/frame d={d}"),
            passed,
            format!("{} entries, max z = {worst:.2}, family-wise band {band:.2}", frame.len()),
        ));
    }
    Ok(out)
}

/// Sampler combinatorics and expectation-value moments.
pub fn dataset_checks(samples: u64, rng: &mut SimRng) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let d = 16;
    for r in [1usize, 4] {
        let est = par::monte_carlo(samples, rng, |g| {
            let s = sample_diagonal_state(d, r, g).expect("valid rank");
            f64::from(u8::from(s.support().contains(&0)))
        });
        out.push(estimate_check("dataset", format!("support-inclusion d={d} r={r}"), &est, r as f64 / d as f64));
    }
    for r in [1usize, 3, 16] {
        let est = par::monte_carlo(samples, rng, |g| {
            let t = haar_state(d, g).expect("valid dim");
            let s = sample_entangled_general(d, r, g).expect("valid rank");
            expectation_general(&s, &t).expect("same dim")
        });
        out.push(estimate_check("dataset", format!("haar-target-mean d={d} r={r}"), &est, 1.0 / d as f64));
    }
    let mut worst = 0.0f64;
    for dd in [2usize, 4, 8] {
        for r in 1..=dd {
            for _ in 0..5 {
                let s = sample_entangled_general(dd, r, rng)?;
                worst = worst.max(s.reduced_state().max_abs_diff(&s.reduced_state_via_partial_trace())?);
            }
        }
    }
    out.push(exact_check(
        "dataset",
        "partial-trace-consistency".into(),
        worst <= 1e-10,
        format!("max entry gap {worst:.2e}"),
    ));
    let family = sample_orthogonal_family(16, 4, 4, rng)?;
    let mut union: Vec<usize> = family.iter().flat_map(|s| s.support().iter().copied()).collect();
    union.sort_unstable();
    out.push(exact_check(
        "dataset",
        "orthogonal-cover d=16 r=4 N=4".into(),
        union == (0..16).collect::<Vec<_>>(),
        format!("{} distinct indices", {
            let mut u = union.clone();
            u.dedup();
            u.len()
        }),
    ));
    Ok(out)
}

/// Monte-Carlo risk against the closed form for `pairs` random state pairs
/// per dimension.
pub fn risk_checks(dims: &[usize], pairs: usize, samples: u64, rng: &mut SimRng) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for &d in dims {
        for p in 0..pairs {
            let u = haar_state(d, rng)?;
            let v = haar_state(d, rng)?;
            let target = risk_closed_form(fidelity_pure(&u, &v)?, d)?;
            let est = risk_monte_carlo(&u, &v, samples, rng)?;
            out.push(estimate_check("risk", format!("pair{p} d={d}"), &est, target));
        }
    }
    Ok(out)
}

/// `E[u(1−u)]` against both the published and the exact closed forms.
pub fn variance_checks(points: &[(usize, usize)], samples: u64, rng: &mut SimRng) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for &(d, r) in points {
        let target = haar_state(d, rng)?;
        let est = estimate_shot_variance(&target, r, samples, rng)?;
        out.push(estimate_check(
            "variance",
            format!("published d={d} r={r}"),
            &est,
            expected_shot_variance(d, r, 1)?,
        ));
        out.push(estimate_check("variance", format!("exact d={d} r={r}"), &est, exact_shot_variance(d, r, 1)?));
    }
    Ok(out)
}

/// Mean squared response gap for an orthogonal target pair, against both
/// closed forms.
pub fn mean_gap_checks(points: &[(usize, usize)], samples: u64, rng: &mut SimRng) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for &(d, r) in points {
        let mu = PureState::basis(d, 0)?;
        let nu = PureState::basis(d, 1)?;
        let rho = rho_metric(0.0, d)?;
        let est = estimate_mean_gap(&mu, &nu, r, samples, rng)?;
        out.push(estimate_check(
            "meangap",
            format!("published d={d} r={r}"),
            &est,
            expected_mean_gap_sq(rho, d, r)?,
        ));
        out.push(estimate_check("meangap", format!("exact d={d} r={r}"), &est, exact_mean_gap_sq(rho, d, r)?));
    }
    Ok(out)
}

/// Packing success in a window around the typical Haar distance, and
/// postcondition replay.
pub fn packing_checks(rng: &mut SimRng) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let (d, eps, gamma, l) = (16usize, 0.75, 2.0 / 0.75 + 1e-9, 10usize);
    let rate = packing_success_rate(d, eps, gamma, l, 100, rng)?;
    out.push(exact_check(
        "packing",
        format!("success-rate d={d} L={l}"),
        rate.mean >= 0.9,
        format!("{:.2} of 100 single attempts", rate.mean),
    ));
    let mut violations = 0;
    let mut successes = 0;
    for _ in 0..20 {
        if let PackingOutcome::Success { states, .. } = packing_sample(8, 0.6, 3.4, 6, 50, rng)? {
            successes += 1;
            violations += packing_violations(&states, 0.6, 3.4)?.len();
        }
    }
    out.push(exact_check(
        "packing",
        "replay d=8 L=6".into(),
        violations == 0 && successes > 0,
        format!("{successes} packings, {violations} violating pairs"),
    ));
    let infeasible = packing_sample(4, 1.01, 3.0, 3, 10, rng)?;
    out.push(exact_check(
        "packing",
        "infeasible-window".into(),
        matches!(infeasible, PackingOutcome::Failure { attempts: 0, .. }),
        "2*eps > 2".into(),
    ));
    Ok(out)
}

/// Projector-overlap tails against `exp(−r₁r₂t²/2)` and `exp(−r₁r₂t²/4)`.
pub fn concentration_checks(d: usize, ranks: &[usize], ts: &[f64], samples: u64, rng: &mut SimRng) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for &r in ranks {
        for &t in ts {
            let est = projector_overlap_tail(d, r, r, t, samples, rng)?;
            let (lb, ub) = overlap_tail_bounds(r, r, t);
            out.push(exact_check(
                "concentration",
                format!("lower d={d} r={r} t={t}"),
                est.lower.mean <= lb + BAND * est.lower.stderr,
                format!("{} <= {lb:.4e}", est.lower),
            ));
            out.push(exact_check(
                "concentration",
                format!("upper d={d} r={r} t={t}"),
                est.upper.mean <= ub + BAND * est.upper.stderr,
                format!("{} <= {ub:.4e}", est.upper),
            ));
        }
    }
    Ok(out)
}

/// Mean of an indicator stream; used for error-rate summaries.
pub fn indicator_mean(values: impl IntoIterator<Item = u8>) -> Estimate {
    values.into_iter().map(f64::from).collect::<MeanAccumulator>().estimate()
}
