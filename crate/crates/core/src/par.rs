//! Data-parallel helpers. With the `parallel` feature the work runs on rayon;
//! without it every helper degrades to a plain sequential loop. Outputs are
//! always returned in index order, so results never depend on scheduling.

use crate::rng::SimRng;
use crate::stats::{Estimate, MeanAccumulator};

/// Samples per Monte-Carlo chunk. Each chunk owns one forked stream, so the
/// estimate depends only on the sample count, never on the worker count.
pub const MC_CHUNK: u64 = 4096;

/// Runs `f` with at most `jobs` workers (`0` = all cores).
#[cfg(feature = "parallel")]
pub fn with_jobs<R, F>(jobs: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("could not build a {jobs}-thread pool ({e}); using the global pool");
            f()
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<R, F>(_jobs: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    f()
}

/// `(0..n).map(f)` collected in order.
#[cfg(feature = "parallel")]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Mean and standard error of `sample(rng)` over `samples` draws.
///
/// One key is drawn from `rng`; chunk `i` then uses the child stream
/// `fork(key, i)`.
pub fn monte_carlo<F>(samples: u64, rng: &mut SimRng, sample: F) -> Estimate
where
    F: Fn(&mut SimRng) -> f64 + Sync + Send,
{
    let base = rng.split();
    let chunks = samples.div_ceil(MC_CHUNK) as usize;
    let parts = map_range(chunks, |i| {
        let mut child = base.fork(i as u64);
        let start = i as u64 * MC_CHUNK;
        let len = MC_CHUNK.min(samples - start);
        let mut acc = MeanAccumulator::new();
        for _ in 0..len {
            acc.push(sample(&mut child));
        }
        acc
    });
    let mut total = MeanAccumulator::new();
    for p in &parts {
        total.merge(p);
    }
    total.estimate()
}

/// Like [`monte_carlo`] but for several statistics of one shared draw.
pub fn monte_carlo_multi<F>(samples: u64, width: usize, rng: &mut SimRng, sample: F) -> Vec<Estimate>
where
    F: Fn(&mut SimRng, &mut [f64]) + Sync + Send,
{
    let base = rng.split();
    let chunks = samples.div_ceil(MC_CHUNK) as usize;
    let parts = map_range(chunks, |i| {
        let mut child = base.fork(i as u64);
        let start = i as u64 * MC_CHUNK;
        let len = MC_CHUNK.min(samples - start);
        let mut accs = vec![MeanAccumulator::new(); width];
        let mut buf = vec![0.0; width];
        for _ in 0..len {
            sample(&mut child, &mut buf);
            for (acc, &x) in accs.iter_mut().zip(&buf) {
                acc.push(x);
            }
        }
        accs
    });
    let mut totals = vec![MeanAccumulator::new(); width];
    for p in &parts {
        for (t, a) in totals.iter_mut().zip(p) {
            t.merge(a);
        }
    }
    totals.iter().map(MeanAccumulator::estimate).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn estimate_independent_of_worker_count() {
        let run = |jobs| {
            with_jobs(jobs, || {
                let mut rng = SimRng::new(3, 9);
                monte_carlo(20_000, &mut rng, |r| r.random::<f64>())
            })
        };
        let one = run(1);
        let many = run(4);
        assert_eq!(one, many);
        assert!(one.within(0.5, 4.0));
    }

    #[test]
    fn map_range_keeps_order() {
        let v = map_range(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }
}
