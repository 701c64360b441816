//! Deterministic parallel execution of a sweep grid.

use crate::error::Result;
use crate::harness::config::SweepConfig;
use crate::learner::{run_trial_with_target, TrialConfig, TrialRecord};
use crate::par;
use crate::rng::{hash_key, SimRng};
use rand::Rng;

const TARGET_PURPOSE: u64 = 0x7461_7267_6574; // "target"
const DATA_PURPOSE: u64 = 0x6461_7461; // "data"

/// Stable identifier of a grid point.
pub fn grid_point_hash(cfg: &TrialConfig) -> u64 {
    hash_key(&[
        cfg.n_qubits as u64,
        cfg.rank as u64,
        cfg.shots.key(),
        cfg.train_size as u64,
        cfg.ortho as u64,
        cfg.candidate_shots.key(),
    ])
}

/// Runs one trial of `point` at the given trial indices.
///
/// The target draw depends only on `(seed, point, trial_u)`; the training
/// data and shot noise additionally depend on `trial_d`.
pub fn run_indexed_trial(master_seed: u64, point: &TrialConfig, trial_u: u32, trial_d: u32) -> Result<TrialRecord> {
    let gp = grid_point_hash(point);
    let k_star = SimRng::derive(master_seed, &[gp, trial_u as u64, TARGET_PURPOSE]).random_range(0..point.dim());
    let key = [gp, trial_u as u64, trial_d as u64, DATA_PURPOSE];
    let mut rng = SimRng::derive(master_seed, &key);
    let mut rec = run_trial_with_target(point, k_star, &mut rng)?;
    rec.trial_u = trial_u;
    rec.trial_d = trial_d;
    rec.seed_hash = hash_key(&[master_seed, gp, trial_u as u64, trial_d as u64]);
    Ok(rec)
}

/// Every trial of the sweep, in canonical order: grid point, then
/// `trial_u`, then `trial_d`. The result does not depend on `cfg.jobs`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let points = cfg.grid_points();
    let per_point = cfg.trials_unitary as usize * cfg.trials_data as usize;
    let total = points.len() * per_point;
    log::info!(
        "sweep: {} grid points x {} trials = {total} trials",
        points.len(),
        per_point
    );
    let results = par::with_jobs(cfg.jobs, || {
        par::map_range(total, |i| {
            let point = &points[i / per_point];
            let t = i % per_point;
            let trial_u = (t / cfg.trials_data as usize) as u32;
            let trial_d = (t % cfg.trials_data as usize) as u32;
            run_indexed_trial(cfg.master_seed, point, trial_u, trial_d)
        })
    });
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::CandidateShotsMode;
    use crate::learner::Shots;

    fn small(jobs: usize) -> SweepConfig {
        SweepConfig {
            n: 3,
            r_list: vec![1, 2],
            m_list: vec![Shots::Finite(10), Shots::Infinite],
            n_list: vec![2],
            ortho: false,
            trials_unitary: 2,
            trials_data: 3,
            candidate_shots_mode: CandidateShotsMode::SameAsM,
            master_seed: 5,
            jobs,
        }
    }

    #[test]
    fn single_trial_single_record() {
        let cfg = SweepConfig {
            r_list: vec![1],
            m_list: vec![Shots::Finite(3)],
            trials_unitary: 1,
            trials_data: 1,
            ..small(1)
        };
        assert_eq!(run_sweep(&cfg).unwrap().len(), 1);
    }

    #[test]
    fn order_and_indices_are_canonical() {
        let recs = run_sweep(&small(0)).unwrap();
        assert_eq!(recs.len(), 4 * 6);
        for (i, rec) in recs.iter().enumerate() {
            assert_eq!(rec.trial_u as usize, (i % 6) / 3);
            assert_eq!(rec.trial_d as usize, i % 3);
        }
    }

    #[test]
    fn result_independent_of_jobs() {
        assert_eq!(run_sweep(&small(1)).unwrap(), run_sweep(&small(4)).unwrap());
    }

    #[test]
    fn target_shared_across_data_trials() {
        let recs = run_sweep(&small(2)).unwrap();
        for chunk in recs.chunks(3) {
            assert!(chunk.iter().all(|r| r.k_star == chunk[0].k_star));
        }
    }
}
