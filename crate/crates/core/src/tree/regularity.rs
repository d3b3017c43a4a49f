use std::ops::Range;

use num_bigint::BigUint;

use super::{level_sizes, ln_big, DegreeProfile, LevelProfile, RunLength};
use crate::error::{Error, Result};

/// Both sides of `L_n <= |T_n| <= 2(K+1) L_n` with `K = lmcs(f, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeBoundRecord {
    pub n: u64,
    pub k: usize,
    pub last_level: BigUint,
    pub total: BigUint,
    pub lemma_bound: BigUint,
    /// `|T_n| / L_n`.
    pub ratio: f64,
    /// `1 + sum_{i<n} 2^{-floor((n-i)/(K+1))}`.
    pub geometric_bound: f64,
    pub holds: bool,
}

pub fn total_size_bound(profile: &DegreeProfile, n: u64) -> Result<SizeBoundRecord> {
    let k = match profile.lmcs(1) {
        RunLength::Finite(k) => k,
        RunLength::Infinite => {
            return Err(Error::Precondition(
                "the profile has unbounded runs of 1, so the size bound does not apply".into(),
            ))
        }
    };
    let levels = level_sizes(profile, n)?;
    let last_level = levels.level(n as usize).clone();
    let total = levels.total();
    let lemma_bound = &last_level * BigUint::from(2 * (k + 1));
    let ratio = (ln_big(&total) - ln_big(&last_level)).exp();
    let geometric_bound = 1.0
        + (0..n)
            .map(|i| 0.5f64.powi(((n - i) / (k as u64 + 1)) as i32))
            .sum::<f64>();
    let holds = last_level <= total && total <= lemma_bound && ratio <= geometric_bound * (1.0 + 1e-12);
    Ok(SizeBoundRecord {
        n,
        k,
        last_level,
        total,
        lemma_bound,
        ratio,
        geometric_bound,
        holds,
    })
}

/// `(n, (1/k) sum_{h=n-k}^{n-1} ln f(h))` for each `n` in `range` with `n >= k`.
pub fn window_averages(profile: &DegreeProfile, k: u64, range: Range<u64>) -> Result<Vec<(u64, f64)>> {
    if k == 0 {
        return Err(Error::InvalidInput("window length must be positive".into()));
    }
    let logs: Vec<f64> = profile
        .prefix(range.end.saturating_sub(1))?
        .iter()
        .map(|&x| (x as f64).ln())
        .collect();
    let mut prefix = vec![0.0];
    for l in &logs {
        prefix.push(prefix.last().unwrap() + l);
    }
    Ok(range
        .filter(|&n| n >= k && (n as usize) < prefix.len())
        .map(|n| (n, (prefix[n as usize] - prefix[(n - k) as usize]) / k as f64))
        .collect())
}

/// `(min, max)` of the window averages over `range`.
pub fn window_oscillation(profile: &DegreeProfile, k: u64, range: Range<u64>) -> Result<(f64, f64)> {
    let avgs = window_averages(profile, k, range)?;
    if avgs.is_empty() {
        return Err(Error::InsufficientData("no complete window in range".into()));
    }
    Ok(avgs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, a)| (lo.min(a), hi.max(a))))
}

/// `ln(L_n) / n`.
pub fn growth_rate_estimate(levels: &LevelProfile) -> Result<f64> {
    let n = levels.height();
    if n == 0 {
        return Err(Error::InsufficientData("need at least one generation".into()));
    }
    Ok(ln_big(levels.level(n)) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_bound_examples() {
        let r = total_size_bound(&DegreeProfile::Constant(2), 10).unwrap();
        assert_eq!((r.total.clone(), r.lemma_bound.clone()), (BigUint::from(2047u32), BigUint::from(2048u32)));
        assert!(r.holds);
        let r = total_size_bound(&DegreeProfile::TwoThree, 4).unwrap();
        assert_eq!((r.total.clone(), r.lemma_bound.clone()), (BigUint::from(57u32), BigUint::from(72u32)));
        let alt = DegreeProfile::Finite((0..40).map(|h| 1 + h % 2).collect());
        let r = total_size_bound(&alt, 40).unwrap();
        assert_eq!(r.k, 1);
        assert!(r.holds && r.ratio <= 4.0 && r.geometric_bound <= 4.0);
        assert!(total_size_bound(&DegreeProfile::Constant(1), 5).is_err());
    }

    #[test]
    fn constant_profile_has_flat_windows() {
        let (lo, hi) = window_oscillation(&DegreeProfile::Constant(3), 5, 0..100).unwrap();
        assert!((hi - lo).abs() < 1e-12);
        assert!((lo - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn blocks_profile_oscillates() {
        let p = DegreeProfile::Blocks { fa: 2, fb: 3 };
        let k = 4;
        let (lo, hi) = window_oscillation(&p, k, 200..400).unwrap();
        assert!(hi - lo >= ((3f64).ln() - 2f64.ln()) / 2.0);
    }

    #[test]
    fn growth_rate_of_binary_tree() {
        let l = level_sizes(&DegreeProfile::Constant(2), 30).unwrap();
        assert!((growth_rate_estimate(&l).unwrap() - 2f64.ln()).abs() < 1e-12);
    }
}
