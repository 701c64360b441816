//! Sweep configuration loaded from TOML.
//!
//! ```toml
//! master_seed = 2024
//! jobs = 0
//!
//! [grid]
//! n = 4
//! r = [1, 2, 4]
//! m = [10, 100, "inf"]
//! N = [8]
//! ortho = false
//!
//! [trials]
//! unitary = 4
//! data = 10
//! candidate_shots = "same_as_m"
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{invalid, Error, Result};
use crate::learner::{Shots, TrialConfig};

/// How candidate responses are measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateShotsMode {
    #[default]
    SameAsM,
    Exact,
}

impl CandidateShotsMode {
    pub fn shots_for(self, m: Shots) -> Shots {
        match self {
            CandidateShotsMode::SameAsM => m,
            CandidateShotsMode::Exact => Shots::Infinite,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: u32,
    pub r_list: Vec<usize>,
    pub m_list: Vec<Shots>,
    pub n_list: Vec<usize>,
    pub ortho: bool,
    pub trials_unitary: u32,
    pub trials_data: u32,
    pub candidate_shots_mode: CandidateShotsMode,
    pub master_seed: u64,
    /// Worker count; 0 uses every core.
    pub jobs: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    master_seed: u64,
    #[serde(default)]
    jobs: usize,
    grid: GridSection,
    #[serde(default)]
    trials: TrialsSection,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    n: u32,
    r: Vec<usize>,
    m: Vec<Shots>,
    #[serde(rename = "N")]
    train_sizes: Vec<usize>,
    #[serde(default)]
    ortho: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct TrialsSection {
    unitary: u32,
    data: u32,
    candidate_shots: CandidateShotsMode,
}

impl Default for TrialsSection {
    fn default() -> Self {
        TrialsSection {
            unitary: 4,
            data: 10,
            candidate_shots: CandidateShotsMode::SameAsM,
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: FileConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let cfg = SweepConfig {
            n: raw.grid.n,
            r_list: raw.grid.r,
            m_list: raw.grid.m,
            n_list: raw.grid.train_sizes,
            ortho: raw.grid.ortho,
            trials_unitary: raw.trials.unitary,
            trials_data: raw.trials.data,
            candidate_shots_mode: raw.trials.candidate_shots,
            master_seed: raw.master_seed,
            jobs: raw.jobs,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn dim(&self) -> usize {
        1usize << self.n.min(16)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_list.is_empty() || self.m_list.is_empty() || self.n_list.is_empty() {
            return Err(Error::InvalidConfig("grid lists r, m and N must be non-empty".into()));
        }
        if self.trials_unitary == 0 || self.trials_data == 0 {
            return Err(invalid("trials", "trial counts must be positive"));
        }
        for &r in &self.r_list {
            for &m in &self.m_list {
                for &nn in &self.n_list {
                    TrialConfig::new(self.n, r, m, nn, false).validate()?;
                }
            }
        }
        Ok(())
    }

    /// Grid points in canonical `(r, m, N)` order. Orthogonal points with
    /// `r·N > d` are dropped with a warning.
    pub fn grid_points(&self) -> Vec<TrialConfig> {
        let d = self.dim();
        let mut r_list = self.r_list.clone();
        let mut m_list = self.m_list.clone();
        let mut n_list = self.n_list.clone();
        for v in [&mut r_list, &mut n_list] {
            v.sort_unstable();
            v.dedup();
        }
        m_list.sort_unstable();
        m_list.dedup();
        let mut out = Vec::new();
        for &r in &r_list {
            for &m in &m_list {
                for &nn in &n_list {
                    if self.ortho && r * nn > d {
                        // once per (r, N), not once per m
                        if m == m_list[0] {
                            log::warn!("skipping orthogonal grid point r={r}, N={nn}: r*N exceeds d={d}");
                        }
                        continue;
                    }
                    out.push(
                        TrialConfig::new(self.n, r, m, nn, self.ortho)
                            .with_candidate_shots(self.candidate_shots_mode.shots_for(m)),
                    );
                }
            }
        }
        out
    }
}
