use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Number of children `f(h)` of every vertex at depth `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreeProfile {
    /// Explicit values `f(0), ..., f(len-1)`.
    Finite(Vec<u64>),
    Constant(u64),
    /// 2 at even depths, 3 at odd depths.
    TwoThree,
    /// `fa` on depths `m(m+1) < h <= (m+1)^2`, `fb` on the rest (and at 0).
    Blocks { fa: u64, fb: u64 },
    /// `floor(e^j)` at depth `j!`, `c` elsewhere.
    Spikes { c: u64 },
}

/// Longest run length, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RunLength {
    Finite(usize),
    Infinite,
}

impl fmt::Display for RunLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunLength::Finite(n) => write!(f, "{n}"),
            RunLength::Infinite => f.write_str("infinite"),
        }
    }
}

/// Length of the longest run of consecutive `a`s in `s`; 0 when absent.
pub fn lmcs(s: &[u64], a: u64) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for &x in s {
        if x == a {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

fn isqrt_ceil(h: u64) -> u64 {
    let mut r = (h as f64).sqrt() as u64;
    while r * r > h {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= h {
        r += 1;
    }
    if r * r == h {
        r
    } else {
        r + 1
    }
}

/// `(j, floor(e^j))` for the largest `j` with `j! == h`.
fn spike_at(h: u64) -> Option<u64> {
    let mut fact: u64 = 1;
    let mut hit = None;
    for j in 1..=20u64 {
        fact = fact.saturating_mul(j);
        if fact == h {
            hit = Some(j);
        }
        if fact > h {
            break;
        }
    }
    hit.map(|j| (j as f64).exp().floor() as u64)
}

impl DegreeProfile {
    pub fn new_finite(values: Vec<u64>) -> Result<DegreeProfile> {
        if let Some(h) = values.iter().position(|&v| v == 0) {
            return Err(Error::InvalidInput(format!("f({h}) = 0, values must be positive")));
        }
        Ok(DegreeProfile::Finite(values))
    }

    pub fn value(&self, h: u64) -> Option<u64> {
        match self {
            DegreeProfile::Finite(v) => usize::try_from(h).ok().and_then(|i| v.get(i).copied()),
            DegreeProfile::Constant(d) => Some(*d),
            DegreeProfile::TwoThree => Some(if h.is_multiple_of(2) { 2 } else { 3 }),
            DegreeProfile::Blocks { fa, fb } => {
                if h == 0 {
                    return Some(*fb);
                }
                let m = isqrt_ceil(h) - 1;
                Some(if h > m * (m + 1) { *fa } else { *fb })
            }
            DegreeProfile::Spikes { c } => Some(spike_at(h).unwrap_or(*c)),
        }
    }

    /// `f(0), ..., f(n-1)`.
    pub fn prefix(&self, n: u64) -> Result<Vec<u64>> {
        (0..n)
            .map(|h| {
                self.value(h).ok_or_else(|| {
                    Error::InvalidInput(format!("profile has no value at depth {h}"))
                })
            })
            .collect()
    }

    /// Defined length for finite profiles.
    pub fn len(&self) -> Option<usize> {
        match self {
            DegreeProfile::Finite(v) => Some(v.len()),
            _ => None,
        }
    }

    /// True only for an empty finite profile.
    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Longest run of `a` over the whole profile.
    pub fn lmcs(&self, a: u64) -> RunLength {
        match self {
            DegreeProfile::Finite(v) => RunLength::Finite(lmcs(v, a)),
            DegreeProfile::Constant(d) => {
                if *d == a {
                    RunLength::Infinite
                } else {
                    RunLength::Finite(0)
                }
            }
            DegreeProfile::TwoThree => RunLength::Finite(usize::from(a == 2 || a == 3)),
            DegreeProfile::Blocks { fa, fb } => {
                if a == *fa || a == *fb {
                    RunLength::Infinite
                } else {
                    RunLength::Finite(0)
                }
            }
            DegreeProfile::Spikes { c } => {
                if a == *c {
                    RunLength::Infinite
                } else {
                    // spikes sit at 1, 2, 6, 24, ...; only 1 and 2 are adjacent
                    let run = lmcs(&self.prefix(721).expect("rule profile"), a);
                    RunLength::Finite(run)
                }
            }
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            DegreeProfile::Finite(v) => {
                let mut out = String::new();
                for (h, x) in v.iter().enumerate() {
                    let _ = writeln!(out, "f {h} {x}");
                }
                out
            }
            DegreeProfile::Constant(d) => format!("rule constant {d}\n"),
            DegreeProfile::TwoThree => "rule twothree\n".into(),
            DegreeProfile::Blocks { fa, fb } => format!("rule blocks {fa} {fb}\n"),
            DegreeProfile::Spikes { c } => format!("rule spikes {c}\n"),
        }
    }

    /// Parses `f <h> <value>` lines (contiguous from 0) or a single
    /// `rule constant <d>` / `rule twothree` / `rule blocks <a> <b>` /
    /// `rule spikes <c>` line.
    pub fn from_text(text: &str) -> Result<DegreeProfile> {
        let mut values: Vec<(usize, u64, usize)> = Vec::new();
        let mut rule: Option<DegreeProfile> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let num = |s: &str| -> Result<u64> {
                match s.parse::<u64>() {
                    Ok(v) if v >= 1 => Ok(v),
                    _ => Err(Error::parse(line_no, format!("expected a positive integer, got '{s}'"))),
                }
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["f", h, v] => {
                    let h: usize = h
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("bad depth '{h}'")))?;
                    values.push((h, num(v)?, line_no));
                    continue;
                }
                ["rule", "constant", d] => DegreeProfile::Constant(num(d)?),
                ["rule", "twothree"] => DegreeProfile::TwoThree,
                ["rule", "blocks", a, b] => DegreeProfile::Blocks { fa: num(a)?, fb: num(b)? },
                ["rule", "spikes", c] => DegreeProfile::Spikes { c: num(c)? },
                _ => return Err(Error::parse(line_no, format!("unrecognized line '{line}'"))),
            };
            if rule.is_some() {
                return Err(Error::parse(line_no, "only one rule line is allowed"));
            }
            rule = Some(parsed);
        }
        match (rule, values.is_empty()) {
            (Some(r), true) => Ok(r),
            (Some(_), false) => Err(Error::parse(0, "cannot mix rule and f lines")),
            (None, true) => Err(Error::parse(0, "empty profile")),
            (None, false) => {
                values.sort_by_key(|&(h, _, _)| h);
                let mut out = Vec::with_capacity(values.len());
                for (i, (h, v, line_no)) in values.into_iter().enumerate() {
                    if h != i {
                        return Err(Error::parse(line_no, format!("depth {h} out of sequence, expected {i}")));
                    }
                    out.push(v);
                }
                Ok(DegreeProfile::Finite(out))
            }
        }
    }
}

/// Generation sizes `L_0 = 1, L_1, ..., L_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub levels: Vec<BigUint>,
}

impl LevelProfile {
    pub fn from_counts(counts: &[u64]) -> LevelProfile {
        LevelProfile {
            levels: counts.iter().map(|&c| BigUint::from(c)).collect(),
        }
    }

    pub fn height(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn level(&self, i: usize) -> &BigUint {
        &self.levels[i]
    }

    /// `L_0 + ... + L_upto`.
    pub fn partial_sum(&self, upto: usize) -> BigUint {
        self.levels[..=upto].iter().sum()
    }

    pub fn total(&self) -> BigUint {
        self.levels.iter().sum()
    }
}

/// Exact `L_i = f(0) * ... * f(i-1)` for `i <= n`.
pub fn level_sizes(profile: &DegreeProfile, n: u64) -> Result<LevelProfile> {
    let f = profile.prefix(n)?;
    let mut levels = Vec::with_capacity(f.len() + 1);
    let mut cur = BigUint::one();
    levels.push(cur.clone());
    for x in f {
        cur *= x;
        levels.push(cur.clone());
    }
    debug_assert!(!levels[0].is_zero());
    Ok(LevelProfile { levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_values() {
        let tt = DegreeProfile::TwoThree;
        assert_eq!(tt.prefix(4).unwrap(), vec![2, 3, 2, 3]);
        let b = DegreeProfile::Blocks { fa: 2, fb: 3 };
        // h: 0 | 1 | 2 | 3 4 | 5 6 | 7 8 9 | 10 11 12 | 13..16 | 17..20
        assert_eq!(
            b.prefix(21).unwrap(),
            vec![3, 2, 3, 2, 2, 3, 3, 2, 2, 2, 3, 3, 3, 2, 2, 2, 2, 3, 3, 3, 3]
        );
        let s = DegreeProfile::Spikes { c: 1 };
        assert_eq!(s.prefix(7).unwrap(), vec![1, 2, 7, 1, 1, 1, 20]);
        assert_eq!(s.value(24), Some(54));
    }

    #[test]
    fn lmcs_examples() {
        assert_eq!(lmcs(&[2, 1, 1, 1, 2, 1, 1], 1), 3);
        assert_eq!(lmcs(&[4; 6], 4), 6);
        assert_eq!(DegreeProfile::Constant(2).lmcs(1), RunLength::Finite(0));
        assert_eq!(DegreeProfile::Constant(1).lmcs(1), RunLength::Infinite);
        assert_eq!(DegreeProfile::Spikes { c: 1 }.lmcs(1), RunLength::Infinite);
        assert_eq!(DegreeProfile::Spikes { c: 3 }.lmcs(1), RunLength::Finite(0));
        assert_eq!(DegreeProfile::TwoThree.lmcs(2), RunLength::Finite(1));
    }

    #[test]
    fn level_examples() {
        let l = level_sizes(&DegreeProfile::Constant(2), 3).unwrap();
        assert_eq!(l.levels, LevelProfile::from_counts(&[1, 2, 4, 8]).levels);
        let tt = level_sizes(&DegreeProfile::TwoThree, 4).unwrap();
        assert_eq!(tt.levels, LevelProfile::from_counts(&[1, 2, 6, 12, 36]).levels);
        assert_eq!(tt.total(), BigUint::from(57u32));
        assert_eq!(tt.partial_sum(3), BigUint::from(21u32));
        assert!(level_sizes(&DegreeProfile::Finite(vec![2, 2]), 3).is_err());
    }

    #[test]
    fn profile_text() {
        for p in [
            DegreeProfile::Finite(vec![2, 1, 3]),
            DegreeProfile::Constant(4),
            DegreeProfile::TwoThree,
            DegreeProfile::Blocks { fa: 2, fb: 3 },
            DegreeProfile::Spikes { c: 2 },
        ] {
            assert_eq!(DegreeProfile::from_text(&p.to_text()).unwrap(), p);
        }
        assert!(DegreeProfile::from_text("f 0 2\nf 2 2\n").is_err());
        assert!(DegreeProfile::from_text("f 0 0\n").is_err());
        assert!(DegreeProfile::from_text("rule constant 2\nf 0 1\n").is_err());
    }
}
