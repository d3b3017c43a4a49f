use std::fmt::Write as _;

use num_traits::ToPrimitive;
use rand::distributions::{Distribution, WeightedIndex};

use super::{LevelProfile, RootedTree};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Offspring law with finite support: `q[i]` is the probability of `i` children.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringDistribution {
    q: Vec<f64>,
}

impl OffspringDistribution {
    pub fn new(q: Vec<f64>) -> Result<OffspringDistribution> {
        if q.is_empty() || q.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidInput("offspring probabilities must be finite and non-negative".into()));
        }
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("offspring probabilities sum to {sum}, not 1")));
        }
        Ok(OffspringDistribution { q })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.q
    }

    pub fn mean(&self) -> f64 {
        self.q.iter().enumerate().map(|(i, p)| i as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.q
            .iter()
            .enumerate()
            .map(|(i, p)| (i as f64 - mu).powi(2) * p)
            .sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.q.iter().enumerate() {
            if *p > 0.0 {
                let _ = writeln!(out, "q {i} {p}");
            }
        }
        out
    }

    /// Parses `q <i> <prob>` lines; unlisted counts have probability 0.
    pub fn from_text(text: &str) -> Result<OffspringDistribution> {
        let mut q: Vec<f64> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let ["q", i, p] = fields.as_slice() else {
                return Err(Error::parse(line_no, format!("expected 'q <i> <prob>', got '{line}'")));
            };
            let i: usize = i
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad offspring count '{i}'")))?;
            let p: f64 = p
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad probability '{p}'")))?;
            if q.len() <= i {
                q.resize(i + 1, 0.0);
            }
            q[i] = p;
        }
        OffspringDistribution::new(q)
    }

    fn require_survival(&self) -> Result<()> {
        if self.q[0] > 0.0 {
            return Err(Error::Unsupported(format!(
                "q_0 = {} > 0; only laws with certain survival are supported",
                self.q[0]
            )));
        }
        Ok(())
    }
}

/// A level exceeded the cap; `completed` holds the generations sampled so far.
#[derive(Debug, thiserror::Error)]
#[error("{source} (after {} completed levels)", completed.levels.len())]
pub struct GwCapError {
    pub completed: LevelProfile,
    #[source]
    pub source: Error,
}

impl From<GwCapError> for Error {
    fn from(e: GwCapError) -> Error {
        e.source
    }
}

/// Draws offspring counts in breadth-first order, calling `on_vertex` with
/// each vertex's number of children.
fn sample_levels(
    q: &OffspringDistribution,
    n: u32,
    seed: u64,
    level_cap: u64,
    mut on_vertex: impl FnMut(usize),
) -> Result<Vec<u64>, GwCapError> {
    let fail = |counts: &[u64], source: Error| GwCapError {
        completed: LevelProfile::from_counts(counts),
        source,
    };
    q.require_survival().map_err(|e| fail(&[], e))?;
    let dist = WeightedIndex::new(q.probabilities())
        .map_err(|e| fail(&[], Error::InvalidInput(e.to_string())))?;
    let mut rng = rng_from_seed(seed);
    let mut counts = vec![1u64];
    for _ in 0..n {
        let z = *counts.last().expect("non-empty");
        let mut next = 0u64;
        for _ in 0..z {
            let c = dist.sample(&mut rng);
            on_vertex(c);
            next += c as u64;
            if next > level_cap {
                return Err(fail(
                    &counts,
                    Error::BudgetExceeded {
                        needed: next as u128,
                        budget: level_cap as usize,
                    },
                ));
            }
        }
        counts.push(next);
    }
    Ok(counts)
}

/// Level sizes `Z_0, ..., Z_n` without building the tree. Uses the same
/// draws as `build_gw`, so both agree for the same seed.
pub fn sample_gw_levels(
    q: &OffspringDistribution,
    n: u32,
    seed: u64,
    level_cap: u64,
) -> Result<LevelProfile, GwCapError> {
    let counts = sample_levels(q, n, seed, level_cap, |_| {})?;
    Ok(LevelProfile::from_counts(&counts))
}

pub fn build_gw(
    q: &OffspringDistribution,
    n: u32,
    seed: u64,
    level_cap: u64,
) -> Result<(RootedTree, LevelProfile), GwCapError> {
    // vertices are numbered in the order their offspring are drawn
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut next_parent = 0usize;
    let counts = sample_levels(q, n, seed, level_cap, |c| {
        for _ in 0..c {
            parent.push(Some(next_parent));
        }
        next_parent += 1;
    })?;
    let tree = RootedTree::from_parents(parent).map_err(|source| GwCapError {
        completed: LevelProfile::from_counts(&counts),
        source,
    })?;
    Ok((tree, LevelProfile::from_counts(&counts)))
}

/// Summary of `W_i = Z_i / mu^i` over a batch of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleReport {
    pub mu: f64,
    pub trajectories: Vec<Vec<f64>>,
    pub mean_w: Vec<f64>,
    pub stderr_w: Vec<f64>,
    /// `(mean W_n - 1) / stderr` at the last level; 0 when the spread vanishes.
    pub z_score_last: f64,
    /// Mean over samples of `S_n = sum_{i<=n} W_i mu^{i-n}`.
    pub discounted_sums: Vec<f64>,
    /// `|S_n - S_{n-1}|` for each `n >= 1`.
    pub discounted_differences: Vec<f64>,
    pub all_positive: bool,
}

pub fn gw_martingale_diagnostics(samples: &[LevelProfile], q: &OffspringDistribution) -> Result<MartingaleReport> {
    let mu = q.mean();
    if mu <= 1.0 {
        return Err(Error::Unsupported(format!("mean offspring {mu} <= 1")));
    }
    let Some(first) = samples.first() else {
        return Err(Error::InsufficientData("no samples".into()));
    };
    let n = first.height();
    if samples.iter().any(|s| s.height() != n) {
        return Err(Error::InvalidInput("samples must share one height".into()));
    }
    let trajectories: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            s.levels
                .iter()
                .enumerate()
                .map(|(i, z)| z.to_f64().unwrap_or(f64::INFINITY) / mu.powi(i as i32))
                .collect()
        })
        .collect();
    let count = trajectories.len() as f64;
    let mut mean_w = vec![0.0; n + 1];
    let mut stderr_w = vec![0.0; n + 1];
    for i in 0..=n {
        let m = trajectories.iter().map(|t| t[i]).sum::<f64>() / count;
        let var = if trajectories.len() > 1 {
            trajectories.iter().map(|t| (t[i] - m).powi(2)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        mean_w[i] = m;
        stderr_w[i] = (var / count).sqrt();
    }
    let z_score_last = if stderr_w[n] > 0.0 {
        (mean_w[n] - 1.0) / stderr_w[n]
    } else {
        0.0
    };
    let discounted_sums: Vec<f64> = (0..=n)
        .map(|m| {
            trajectories
                .iter()
                .map(|t| (0..=m).map(|i| t[i] * mu.powi(i as i32 - m as i32)).sum::<f64>())
                .sum::<f64>()
                / count
        })
        .collect();
    let discounted_differences = discounted_sums.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let all_positive = trajectories.iter().all(|t| t.iter().all(|&w| w > 0.0));
    Ok(MartingaleReport {
        mu,
        trajectories,
        mean_w,
        stderr_w,
        z_score_last,
        discounted_sums,
        discounted_differences,
        all_positive,
    })
}
