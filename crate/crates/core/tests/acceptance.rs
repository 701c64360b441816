//! Acceptance suite. Every criterion prints one `PASS`/`FAIL` line (plus
//! per-check detail) and asserts its outcome.

use std::io::Write;
use std::time::{Duration, Instant};

use qnfl::harness::csv_io::{aggregate, write_trials, AggregateRow, TrialRow};
use qnfl::harness::verify::{concentration_checks, haar_checks, mean_gap_checks, risk_checks, variance_checks, CheckResult};
use qnfl::harness::{run_sweep, CandidateShotsMode, SweepConfig};
use qnfl::learner::{run_trial, Shots, TrialConfig};
use qnfl::stats::{combined_stderr, Estimate, MeanAccumulator};
use qnfl::theory::{
    branch_switch_shots, ideal_nfl_bound, nfl_bound_formal, nfl_bound_informal, BoundInput, DEFAULT_EPS_TILDE,
};
use qnfl::SimRng;
use rand::Rng;

/// Writes straight to the process stdout so lines survive test capture.
fn line(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn verdict(criterion: &str, passed: bool, detail: &str) -> bool {
    line(&format!("{} [{criterion}] {detail}", if passed { "PASS" } else { "FAIL" }));
    passed
}

fn checks_verdict(criterion: &str, checks: &[CheckResult], elapsed: Duration, budget: Duration) -> bool {
    for c in checks {
        line(&format!("    {c}"));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let in_time = elapsed <= budget;
    verdict(
        criterion,
        failed == 0 && in_time,
        &format!("{} checks, {failed} outside 3 SE, {:.1}s (budget {}s)", checks.len(), elapsed.as_secs_f64(), budget.as_secs()),
    )
}

#[test]
fn haar_moment_suite() {
    let start = Instant::now();
    let mut rng = SimRng::new(101, 0);
    let checks = haar_checks(&[2, 4, 8], 100_000, &mut rng).unwrap();
    assert!(checks_verdict("haar-moments", &checks, start.elapsed(), Duration::from_secs(120)));
}

#[test]
fn risk_equivalence() {
    let start = Instant::now();
    let mut rng = SimRng::new(102, 0);
    let checks = risk_checks(&[2, 4, 8], 20, 1_000_000, &mut rng).unwrap();
    assert!(checks_verdict("risk-equivalence", &checks, start.elapsed(), Duration::from_secs(300)));
}

#[test]
fn shot_variance_formula() {
    let start = Instant::now();
    let mut rng = SimRng::new(103, 0);
    let checks = variance_checks(&[(4, 1), (4, 2), (8, 4)], 100_000, &mut rng).unwrap();
    let (published, exact): (Vec<_>, Vec<_>) = checks.into_iter().partition(|c| c.name.starts_with("published"));
    checks_verdict("shot-variance (exact form, reference)", &exact, start.elapsed(), Duration::from_secs(120));
    assert!(checks_verdict("shot-variance", &published, start.elapsed(), Duration::from_secs(120)));
}

#[test]
fn mean_gap_formula() {
    let start = Instant::now();
    let mut rng = SimRng::new(104, 0);
    let checks = mean_gap_checks(&[(4, 2), (8, 4)], 100_000, &mut rng).unwrap();
    let (published, exact): (Vec<_>, Vec<_>) = checks.into_iter().partition(|c| c.name.starts_with("published"));
    checks_verdict("mean-gap (exact form, reference)", &exact, start.elapsed(), Duration::from_secs(120));
    assert!(checks_verdict("mean-gap", &published, start.elapsed(), Duration::from_secs(120)));
}

fn transition_summary(m: Shots) -> Vec<AggregateRow> {
    let cfg = SweepConfig {
        n: 4,
        r_list: (1..=16).collect(),
        m_list: vec![m],
        n_list: vec![8],
        ortho: false,
        trials_unitary: 200,
        trials_data: 10,
        candidate_shots_mode: CandidateShotsMode::SameAsM,
        master_seed: 105,
        jobs: 0,
    };
    let rows: Vec<TrialRow> = run_sweep(&cfg).unwrap().iter().map(TrialRow::from).collect();
    aggregate(&rows)
}

fn profile(rows: &[AggregateRow]) -> String {
    rows.iter()
        .map(|a| format!("r={}:{:.3}", a.r, a.mean_normalized_error))
        .collect::<Vec<_>>()
        .join(" ")
}

fn gap_in_se(a: &AggregateRow, b: &AggregateRow) -> f64 {
    let se = (a.stderr_normalized_error.powi(2) + b.stderr_normalized_error.powi(2)).sqrt();
    (a.mean_normalized_error - b.mean_normalized_error) / se
}

#[test]
fn transition_phenomenon() {
    let start = Instant::now();
    let high = transition_summary(Shots::Finite(20_000));
    let low = transition_summary(Shots::Finite(10));
    assert!(high.iter().chain(&low).all(|a| a.trials == 2000));
    line(&format!("    m=20000: {}", profile(&high)));
    line(&format!("    m=10:    {}", profile(&low)));

    let (r1, r16) = (&high[0], &high[15]);
    let z_high = gap_in_se(r1, r16);
    let high_ok = verdict(
        "transition (i) m=20000",
        z_high >= 3.0,
        &format!("r=1 {:.4} vs r=16 {:.4}: gap {z_high:.1} combined SE", r1.mean_normalized_error, r16.mean_normalized_error),
    );

    let best = low
        .iter()
        .min_by(|a, b| a.mean_normalized_error.total_cmp(&b.mean_normalized_error))
        .unwrap();
    let z_low = gap_in_se(&low[15], best);
    let low_ok = verdict(
        "transition (ii) m=10",
        (2..=6).contains(&best.r) && z_low >= 3.0,
        &format!(
            "minimum at r*={} ({:.4}); r=16 {:.4} exceeds it by {z_low:.1} combined SE",
            best.r, best.mean_normalized_error, low[15].mean_normalized_error
        ),
    );
    let in_time = verdict(
        "transition runtime",
        start.elapsed() <= Duration::from_secs(600),
        &format!("{:.1}s (budget 600s)", start.elapsed().as_secs_f64()),
    );
    assert!(high_ok && low_ok && in_time);
}

#[test]
fn orthogonal_family_exactness() {
    let mut rng = SimRng::new(106, 0);
    let mut all = true;
    for (r, n) in [(1, 16), (2, 8), (4, 4), (8, 2), (16, 1)] {
        let cfg = TrialConfig::new(4, r, Shots::Infinite, n, true);
        let errors: u64 = (0..10_000).map(|_| run_trial(&cfg, &mut rng).unwrap().error_indicator as u64).sum();
        all &= verdict(
            &format!("ortho-exactness r={r} N={n}"),
            errors == 0,
            &format!("{} / 10000 error-free trials", 10_000 - errors),
        );
    }
    assert!(all);
}

#[test]
fn error_nonincreasing_in_training_size() {
    let mut rng = SimRng::new(107, 0);
    let ests: Vec<(usize, Estimate)> = [1usize, 2, 4, 8, 16]
        .into_iter()
        .map(|n| {
            let cfg = TrialConfig::new(4, 1, Shots::Infinite, n, false);
            let acc: MeanAccumulator = (0..10_000).map(|_| run_trial(&cfg, &mut rng).unwrap().error_indicator as f64).collect();
            (n, acc.estimate())
        })
        .collect();
    let mut ok = true;
    for w in ests.windows(2) {
        let ((na, a), (nb, b)) = (&w[0], &w[1]);
        let rise = (b.mean - a.mean) / combined_stderr(a, b).max(f64::MIN_POSITIVE);
        ok &= rise <= 3.0;
        line(&format!("    N={na} {:.4} -> N={nb} {:.4} (change {rise:+.1} SE)", a.mean, b.mean));
    }
    assert!(verdict("N-monotonicity", ok, "no significant increase between consecutive N"));
}

#[test]
fn bound_evaluators() {
    let full = ideal_nfl_bound(16, 16, 1).unwrap();
    let one = ideal_nfl_bound(16, 1, 1).unwrap();
    let ideal_ok = verdict(
        "bounds: ideal values",
        full == 0.0 && (one - 0.9375).abs() < 1e-15,
        &format!("ideal(16,16,1) = {full}, ideal(16,1,1) = {one}"),
    );

    let mut worst = 0.0f64;
    for r in 1..=16usize {
        for mult in [1.0, 16.0] {
            let b = BoundInput {
                log_multiplier: mult,
                ..BoundInput::new(16, 8, Shots::Finite(1), r)
            };
            let m_star = branch_switch_shots(&b).unwrap();
            // independent solve of 128·m·ε̃²/(r(d+1)) = L·r·log₂ d
            let eps2 = DEFAULT_EPS_TILDE * DEFAULT_EPS_TILDE;
            let want = mult * (r as f64) * 4.0 * (r as f64) * 17.0 / (128.0 * eps2);
            worst = worst.max(((m_star - want) / want).abs());
        }
    }
    let switch_ok = verdict(
        "bounds: branch switch",
        worst < 1e-10,
        &format!("max relative gap to closed form {worst:.1e}"),
    );

    let mut rng = SimRng::new(108, 0);
    let mut negatives = 0;
    for _ in 0..10_000 {
        let n_q = rng.random_range(1u32..=8);
        let d = 1usize << n_q;
        let r = rng.random_range(1..=d);
        let n = rng.random_range(0..=4 * d);
        let m = if rng.random_bool(0.1) { Shots::Infinite } else { Shots::Finite(rng.random_range(1..=1_000_000)) };
        let eps = rng.random_range(0.12501..0.17677);
        let b = BoundInput {
            eps_tilde: eps,
            log_multiplier: if rng.random_bool(0.5) { 1.0 } else { 16.0 },
            ..BoundInput::new(d, n, m, r)
        };
        let vals = [
            nfl_bound_formal(&b).unwrap(),
            nfl_bound_informal(n_q, n, m, r, eps).unwrap(),
            ideal_nfl_bound(d, r, n.max(1)).unwrap(),
        ];
        negatives += vals.iter().filter(|v| v.is_nan() || **v < 0.0).count();
    }
    let grid_ok = verdict(
        "bounds: non-negative grid",
        negatives == 0,
        &format!("{negatives} negative values over 10000 random points"),
    );
    assert!(ideal_ok && switch_ok && grid_ok);
}

#[test]
fn concentration_tails() {
    let mut rng = SimRng::new(109, 0);
    let checks = concentration_checks(32, &[1, 2, 3, 4], &[0.3, 0.5], 100_000, &mut rng).unwrap();
    for c in &checks {
        line(&format!("    {c}"));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    assert!(verdict(
        "concentration",
        failed == 0,
        &format!("{} tail checks, {failed} above bound + 3 SE", checks.len())
    ));
}

#[test]
fn sweep_determinism() {
    let cfg = |jobs| SweepConfig {
        n: 4,
        r_list: vec![2],
        m_list: vec![Shots::Finite(100), Shots::Infinite],
        n_list: vec![8],
        ortho: false,
        trials_unitary: 4,
        trials_data: 10,
        candidate_shots_mode: CandidateShotsMode::SameAsM,
        master_seed: 110,
        jobs,
    };
    let bytes = |jobs| {
        let mut buf = Vec::new();
        write_trials(&mut buf, &run_sweep(&cfg(jobs)).unwrap()).unwrap();
        buf
    };
    let (one, eight) = (bytes(1), bytes(8));
    assert!(verdict(
        "determinism",
        one == eight && !one.is_empty(),
        &format!("jobs=1 and jobs=8 CSVs: {} bytes each, identical = {}", one.len(), one == eight)
    ));
}
