//! Deterministic hierarchical graphs over a bipartite base graph.
//!
//! A vertex of `HM_n` is a word of length `n` over the alphabet `0..N`,
//! indexed as the base-`N` number with the first letter most significant.
//! Two words are adjacent when, after their longest common prefix, both
//! remainders are typed (all letters from one class), the types differ,
//! and every coordinate pair is a base edge.

mod base;
mod path;

pub use base::{BaseGraph, LetterType};
pub use path::{hm_construct_path, hm_extremal_pair, HmPath};

use crate::cover::{verify_witness_set, BoxCover, CoverMethod, WitnessSet};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, MetricMode};

/// Largest `HM_n` that `build_hm` will materialize by default.
pub const DEFAULT_HM_VERTEX_BUDGET: usize = 1 << 21;

/// A word over the base alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code(pub Vec<usize>);

impl Code {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_index(mut index: usize, num_letters: usize, n: usize) -> Code {
        let mut letters = vec![0; n];
        for slot in letters.iter_mut().rev() {
            *slot = index % num_letters;
            index /= num_letters;
        }
        Code(letters)
    }

    pub fn to_index(&self, num_letters: usize) -> usize {
        self.0.iter().fold(0, |acc, &x| acc * num_letters + x)
    }

    /// Digit string for alphabets up to 36 letters, dot-separated otherwise.
    pub fn to_label(&self, num_letters: usize) -> String {
        if num_letters <= 36 {
            self.0
                .iter()
                .map(|&x| std::char::from_digit(x as u32, 36).expect("letter below 36"))
                .collect()
        } else {
            self.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    pub fn parse_label(label: &str, num_letters: usize) -> Result<Code> {
        let letters: Option<Vec<usize>> = if num_letters <= 36 {
            label.chars().map(|c| c.to_digit(36).map(|d| d as usize)).collect()
        } else {
            label.split('.').map(|t| t.parse().ok()).collect()
        };
        match letters {
            Some(l) if l.iter().all(|&x| x < num_letters) && !l.is_empty() => Ok(Code(l)),
            _ => Err(Error::InvalidInput(format!(
                "'{label}' is not a word over {num_letters} letters"
            ))),
        }
    }

    pub fn common_prefix_len(&self, other: &Code) -> usize {
        self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count()
    }
}

/// Type of a word when all its letters share one class.
pub fn word_type(base: &BaseGraph, word: &[usize]) -> Option<LetterType> {
    let (&first, rest) = word.split_first()?;
    let t = base.letter_type(first);
    rest.iter().all(|&x| base.letter_type(x) == t).then_some(t)
}

/// Adjacency test straight from the edge rule.
pub fn hm_adjacent(base: &BaseGraph, x: &Code, y: &Code) -> bool {
    if x.len() != y.len() || x == y {
        return false;
    }
    let k = x.common_prefix_len(y);
    let (xs, ys) = (&x.0[k..], &y.0[k..]);
    match (word_type(base, xs), word_type(base, ys)) {
        (Some(a), Some(b)) if a != b => xs.iter().zip(ys).all(|(&a, &b)| base.is_edge(a, b)),
        _ => false,
    }
}

/// Checked `N^n`.
pub fn hm_num_vertices(base: &BaseGraph, n: usize) -> Option<u128> {
    (base.num_letters() as u128).checked_pow(u32::try_from(n).ok()?)
}

pub fn build_hm(base: &BaseGraph, n: usize) -> Result<Graph> {
    build_hm_with_budget(base, n, DEFAULT_HM_VERTEX_BUDGET)
}

pub fn build_hm_with_budget(base: &BaseGraph, n: usize, budget: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidInput("HM_n needs n >= 1".into()));
    }
    let letters = base.num_letters();
    let needed = hm_num_vertices(base, n).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let total = needed as usize;
    let mut builder = GraphBuilder::new(total);
    let mut buf = vec![0usize; n];
    for idx in 0..total {
        let x = Code::from_index(idx, letters, n);
        builder.set_label(idx, x.to_label(letters))?;
        // a typed postfix x[k..] is typed for every larger k too, so scan
        // from the right and stop at the first mixed postfix
        for k in (0..n).rev() {
            if word_type(base, &x.0[k..]).is_none() {
                break;
            }
            buf.copy_from_slice(&x.0);
            for_each_neighbor_tail(base, &x.0, k, &mut buf, &mut |y| {
                let j = y.iter().fold(0, |acc, &c| acc * letters + c);
                if j > idx {
                    builder.add_edge(idx, j).expect("indices are in range");
                }
            });
        }
    }
    Ok(builder.freeze())
}

fn for_each_neighbor_tail(
    base: &BaseGraph,
    x: &[usize],
    pos: usize,
    buf: &mut [usize],
    f: &mut impl FnMut(&[usize]),
) {
    if pos == x.len() {
        f(buf);
        return;
    }
    for &y in base.neighbors(x[pos]) {
        buf[pos] = y;
        for_each_neighbor_tail(base, x, pos + 1, buf, f);
    }
}

/// `diam(HM_n) = 2(n-1) + diam(G)`.
pub fn hm_diameter_formula(base: &BaseGraph, n: usize) -> Result<u32> {
    if n == 0 {
        return Err(Error::InvalidInput("HM_n needs n >= 1".into()));
    }
    Ok(2 * (n as u32 - 1) + base.diameter())
}

/// Box size used at scale `k`: one more than the diameter of `HM_k`.
pub fn hm_ell(base: &BaseGraph, k: usize) -> Result<u32> {
    Ok(hm_diameter_formula(base, k)? + 1)
}

/// Boxes `N^{n-k}` words by their first `n-k` letters.
///
/// Each box is a copy of `HM_k`, so the cover is valid at `ell = hm_ell(k)`
/// in both metrics. For `k > n` the whole graph is one box.
pub fn hm_prefix_boxing(base: &BaseGraph, n: usize, k: usize) -> Result<BoxCover> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput(format!(
            "prefix boxing needs n >= 1 and k >= 1, got n={n} k={k}"
        )));
    }
    let letters = base.num_letters();
    let total = hm_num_vertices(base, n)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::BudgetExceeded {
            needed: hm_num_vertices(base, n).unwrap_or(u128::MAX),
            budget: usize::MAX,
        })?;
    let ell = hm_ell(base, k)?;
    let boxes = if k >= n {
        vec![(0..total).collect()]
    } else {
        let width = letters.pow(k as u32);
        (0..total / width)
            .map(|p| (p * width..(p + 1) * width).collect())
            .collect()
    };
    Ok(BoxCover {
        ell,
        mode: MetricMode::SubgraphDistance,
        boxes,
        method: CoverMethod::Constructive,
        optimal: false,
    })
}

/// Words that pairwise need separate boxes at `ell = hm_ell(k)`.
///
/// Any prefix of length `n-k-n_1` is followed by an alternating tail of
/// length `n_1+k` that starts with an arbitrary letter; each next letter is
/// the smallest letter of the other class. This gives `N^{n-k+1-n_1}` words.
pub fn hm_witness_codes(base: &BaseGraph, n: usize, k: usize) -> Result<Vec<Code>> {
    let (n1, _) = base.class_sizes();
    if k == 0 || n < k + n1 {
        return Err(Error::Precondition(format!(
            "witness construction needs k >= 1 and n - k >= n_1, got n={n} k={k} n_1={n1}"
        )));
    }
    let letters = base.num_letters();
    let prefix_len = n - k - n1;
    let tail_len = n1 + k;
    let count = letters
        .checked_pow(prefix_len as u32)
        .ok_or(Error::BudgetExceeded {
            needed: u128::MAX,
            budget: usize::MAX,
        })?;
    let mut out = Vec::with_capacity(count * letters);
    for p in 0..count {
        let prefix = Code::from_index(p, letters, prefix_len);
        for start in 0..letters {
            let mut word = prefix.0.clone();
            let mut cur = start;
            word.push(cur);
            for _ in 1..tail_len {
                cur = base.first_of_type(base.letter_type(cur).other());
                word.push(cur);
            }
            out.push(Code(word));
        }
    }
    Ok(out)
}

/// Witness words mapped to vertex indices and certified on `graph`.
pub fn hm_witness_set(base: &BaseGraph, graph: &Graph, n: usize, k: usize) -> Result<WitnessSet> {
    let letters = base.num_letters();
    let vertices: Vec<usize> = hm_witness_codes(base, n, k)?
        .iter()
        .map(|c| c.to_index(letters))
        .collect();
    verify_witness_set(graph, &vertices, hm_ell(base, k)?)
}

/// `HM_n` together with its base graph.
#[derive(Debug, Clone)]
pub struct HmModel {
    pub base: BaseGraph,
    pub n: usize,
    pub graph: Graph,
}

impl HmModel {
    pub fn new(base: BaseGraph, n: usize) -> Result<HmModel> {
        let graph = build_hm(&base, n)?;
        Ok(HmModel { base, n, graph })
    }

    pub fn code(&self, v: usize) -> Code {
        Code::from_index(v, self.base.num_letters(), self.n)
    }

    pub fn index(&self, code: &Code) -> Result<usize> {
        if code.len() != self.n || code.0.iter().any(|&x| x >= self.base.num_letters()) {
            return Err(Error::InvalidInput(format!("{code:?} is not a vertex of HM_{}", self.n)));
        }
        Ok(code.to_index(self.base.num_letters()))
    }

    pub fn diameter_formula(&self) -> u32 {
        hm_diameter_formula(&self.base, self.n).expect("n >= 1")
    }

    pub fn prefix_boxing(&self, k: usize) -> Result<BoxCover> {
        hm_prefix_boxing(&self.base, self.n, k)
    }

    pub fn witness_set(&self, k: usize) -> Result<WitnessSet> {
        hm_witness_set(&self.base, &self.graph, self.n, k)
    }

    pub fn construct_path(&self, x: &Code, y: &Code) -> Result<HmPath> {
        self.index(x)?;
        self.index(y)?;
        hm_construct_path(&self.base, x, y)
    }
}
