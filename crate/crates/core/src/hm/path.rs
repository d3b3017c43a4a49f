//! Explicit walks realizing the diameter upper bound of `HM_n`.

use super::{BaseGraph, Code, LetterType};
use crate::error::{Error, Result};

/// A walk between two words together with the block counts of their
/// postfixes after the common prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HmPath {
    pub words: Vec<Code>,
    pub r: usize,
    pub q: usize,
}

impl HmPath {
    /// Number of edges traversed.
    pub fn len(&self) -> usize {
        self.words.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.len() <= 1
    }

    /// `r + q + diam(G) - 2`.
    pub fn bound(&self, base: &BaseGraph) -> usize {
        self.r + self.q + base.diameter() as usize - 2
    }
}

/// Start offsets of the maximal typed blocks of `word[from..]`.
fn block_starts(base: &BaseGraph, word: &[usize], from: usize) -> Vec<usize> {
    let mut starts = vec![from];
    for i in from + 1..word.len() {
        if base.letter_type(word[i]) != base.letter_type(word[i - 1]) {
            starts.push(i);
        }
    }
    starts
}

/// Collapses the postfix of `word` into a single typed block by repeatedly
/// applying the self-map to the trailing blocks. Returns every intermediate
/// word, starting with `word` itself.
fn collapse(base: &BaseGraph, map: &[usize], word: &Code, from: usize) -> (Vec<Code>, usize) {
    let starts = block_starts(base, &word.0, from);
    let mut cur = word.clone();
    let mut steps = vec![cur.clone()];
    for &s in starts.iter().skip(1).rev() {
        for x in &mut cur.0[s..] {
            *x = map[*x];
        }
        steps.push(cur.clone());
    }
    (steps, starts.len())
}

/// A walk from `x` to `y` in `HM_n` of length at most `r + q + diam(G) - 2`,
/// where `r` and `q` count the typed blocks of the two postfixes.
pub fn hm_construct_path(base: &BaseGraph, x: &Code, y: &Code) -> Result<HmPath> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::InvalidInput("words must have the same non-zero length".into()));
    }
    if x == y {
        return Err(Error::InvalidInput("path endpoints must differ".into()));
    }
    let map = base.self_map()?;
    let k = x.common_prefix_len(y);
    let (from_x, r) = collapse(base, &map, x, k);
    let (from_y, q) = collapse(base, &map, y, k);
    let xs = from_x.last().expect("non-empty");
    let ys = from_y.last().expect("non-empty");

    let n = x.len();
    let tracks: Vec<Vec<usize>> = (k..n).map(|i| base.shortest_path(xs.0[i], ys.0[i])).collect();
    let m = tracks.iter().map(|t| t.len() - 1).max().unwrap_or(0);

    let mut words = from_x.clone();
    for step in 1..=m {
        let mut w = xs.clone();
        for (i, t) in tracks.iter().enumerate() {
            let last = t.len() - 1;
            w.0[k + i] = if step <= last {
                t[step]
            } else if (step - last) % 2 == 1 {
                map[t[last]]
            } else {
                t[last]
            };
        }
        words.push(w);
    }
    words.extend(from_y.iter().rev().skip(1).cloned());
    debug_assert_eq!(words.last(), Some(y));
    Ok(HmPath { words, r, q })
}

/// Two words at distance `diam(HM_n)`: their first letters are at base
/// distance `diam(G)` and both tails alternate between classes.
pub fn hm_extremal_pair(base: &BaseGraph, n: usize) -> Result<(Code, Code)> {
    if n == 0 {
        return Err(Error::InvalidInput("HM_n needs n >= 1".into()));
    }
    let d = base.diameter();
    let (a, b) = (0..base.num_letters())
        .flat_map(|a| (0..base.num_letters()).map(move |b| (a, b)))
        .find(|&(a, b)| base.distances_from(a)[b] == d)
        .expect("some pair realizes the diameter");
    let tail = |start: usize| -> Code {
        let mut w = vec![start];
        let mut t: LetterType = base.letter_type(start);
        for _ in 1..n {
            t = t.other();
            w.push(base.first_of_type(t));
        }
        Code(w)
    };
    Ok((tail(a), tail(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hm::{hm_adjacent, HmModel};

    fn check_walk(base: &BaseGraph, p: &HmPath) {
        for w in p.words.windows(2) {
            assert!(hm_adjacent(base, &w[0], &w[1]), "{:?} -> {:?}", w[0], w[1]);
        }
        assert!(p.len() <= p.bound(base));
    }

    #[test]
    fn cherry_extremal_pair_has_length_six() {
        let base = BaseGraph::cherry();
        let (x, y) = hm_extremal_pair(&base, 3).unwrap();
        assert_eq!((x.0.as_slice(), y.0.as_slice()), (&[0, 1, 0][..], &[2, 1, 0][..]));
        let p = hm_construct_path(&base, &x, &y).unwrap();
        check_walk(&base, &p);
        assert_eq!((p.r, p.q, p.len()), (3, 3, 6));
    }

    #[test]
    fn every_pair_gets_a_valid_walk() {
        for (base, n) in [(BaseGraph::cherry(), 3), (BaseGraph::fan(), 2)] {
            let m = HmModel::new(base.clone(), n).unwrap();
            let total = m.graph.num_vertices();
            for u in 0..total {
                for v in 0..total {
                    if u == v {
                        continue;
                    }
                    let p = m.construct_path(&m.code(u), &m.code(v)).unwrap();
                    assert_eq!(p.words.first(), Some(&m.code(u)));
                    assert_eq!(p.words.last(), Some(&m.code(v)));
                    check_walk(&base, &p);
                }
            }
        }
    }
}
