//! Rooted trees: spherically symmetric trees, Galton–Watson samples, greedy
//! subtree boxing and the generation-count bounds on `N_B`.

mod gw;
mod profile;
mod regularity;

pub use gw::{
    build_gw, gw_martingale_diagnostics, sample_gw_levels, GwCapError, MartingaleReport,
    OffspringDistribution,
};
pub use profile::{level_sizes, lmcs, DegreeProfile, LevelProfile, RunLength};
pub use regularity::{
    growth_rate_estimate, total_size_bound, window_averages, window_oscillation, SizeBoundRecord,
};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::cover::{verify_witness_set, BoxCover, CoverMethod, WitnessSet};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, MetricMode};

pub const DEFAULT_TREE_VERTEX_BUDGET: usize = 1 << 21;

/// A rooted tree with vertices numbered in breadth-first order from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    pub graph: Graph,
    pub root: usize,
    pub depth: Vec<u32>,
    pub parent: Vec<Option<usize>>,
    pub height: u32,
}

impl RootedTree {
    /// Builds from a parent array in which parents precede their children.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<RootedTree> {
        let n = parent.len();
        if n == 0 || parent[0].is_some() {
            return Err(Error::InvalidInput("vertex 0 must be the root".into()));
        }
        let mut depth = vec![0u32; n];
        let mut builder = GraphBuilder::new(n);
        for v in 1..n {
            let p = parent[v]
                .filter(|&p| p < v)
                .ok_or_else(|| Error::InvalidInput(format!("vertex {v} needs a parent below it")))?;
            depth[v] = depth[p] + 1;
            builder.add_edge(p, v)?;
        }
        let height = depth.iter().copied().max().unwrap_or(0);
        Ok(RootedTree {
            graph: builder.freeze(),
            root: 0,
            depth,
            parent,
            height,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.depth.len()
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(move |&w| self.parent[w] == Some(v))
    }

    pub fn generation(&self, g: u32) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices()).filter(move |&v| self.depth[v] == g)
    }

    pub fn level_profile(&self) -> LevelProfile {
        let mut counts = vec![0u64; self.height as usize + 1];
        for &d in &self.depth {
            counts[d as usize] += 1;
        }
        LevelProfile::from_counts(&counts)
    }
}

/// Explicit spherically symmetric tree of height `n`.
pub fn build_spherical(profile: &DegreeProfile, n: u32) -> Result<(RootedTree, LevelProfile)> {
    build_spherical_with_budget(profile, n, DEFAULT_TREE_VERTEX_BUDGET)
}

pub fn build_spherical_with_budget(
    profile: &DegreeProfile,
    n: u32,
    budget: usize,
) -> Result<(RootedTree, LevelProfile)> {
    let levels = level_sizes(profile, n as u64)?;
    let total = levels.total();
    if total > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: total.to_u128().unwrap_or(u128::MAX),
            budget,
        });
    }
    let f = profile.prefix(n as u64)?;
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut frontier = 0..1usize;
    for &fh in &f {
        let start = parent.len();
        for v in frontier.clone() {
            for _ in 0..fh {
                parent.push(Some(v));
            }
        }
        frontier = start..parent.len();
    }
    Ok((RootedTree::from_parents(parent)?, levels))
}

/// `G(n, k)`: with `n + 1 = a(k+1) + b`, the sum of `L_{n+1-i(k+1)}` for
/// `i = 1..a`, plus one when `b > 0`.
pub fn greedy_count(levels: &LevelProfile, n: u32, k: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidInput("greedy boxing needs k >= 1".into()));
    }
    if (levels.height() as u32) < n {
        return Err(Error::InvalidInput(format!(
            "level profile has height {}, need {n}",
            levels.height()
        )));
    }
    let (a, b) = ((n + 1) / (k + 1), (n + 1) % (k + 1));
    let mut g: BigUint = (1..=a)
        .map(|i| levels.level((n + 1 - i * (k + 1)) as usize).clone())
        .sum();
    if b > 0 {
        g += 1u32;
    }
    Ok(g)
}

/// Subtrees of depth `k` hanging from every generation `n+1-i(k+1)`, plus
/// the root box of depth `b-1` when `b > 0`. Valid at `ell = 2k+1`.
pub fn greedy_tree_boxing(tree: &RootedTree, k: u32) -> Result<(BoxCover, BigUint)> {
    if k == 0 {
        return Err(Error::InvalidInput("greedy boxing needs k >= 1".into()));
    }
    let n = tree.height;
    let counts = tree.level_profile();
    for v in 0..tree.num_vertices() {
        if tree.depth[v] < n && tree.children(v).next().is_none() {
            return Err(Error::Precondition(format!(
                "vertex {v} at depth {} has no children below height {n}",
                tree.depth[v]
            )));
        }
    }
    let b = (n + 1) % (k + 1);
    let mut index = vec![usize::MAX; tree.num_vertices()];
    let mut boxes: Vec<Vec<usize>> = Vec::new();
    for v in 0..tree.num_vertices() {
        let d = tree.depth[v];
        let starts_box = (n + 1 - d).is_multiple_of(k + 1);
        if starts_box || (d == 0 && b > 0) {
            index[v] = boxes.len();
            boxes.push(vec![v]);
        } else {
            let p = tree.parent[v].expect("non-root vertex");
            index[v] = index[p];
            boxes[index[v]].push(v);
        }
    }
    let g = greedy_count(&counts, n, k)?;
    debug_assert_eq!(BigUint::from(boxes.len()), g);
    let cover = BoxCover {
        ell: 2 * k + 1,
        mode: MetricMode::SubgraphDistance,
        boxes,
        method: CoverMethod::Greedy,
        optimal: false,
    };
    Ok((cover, g))
}

/// `(L_{n-k}, min(G(n,k), L_0 + ... + L_{n-k}))`, or `(1, 1)` when `k > n`.
pub fn tree_box_bounds(levels: &LevelProfile, n: u32, k: u32) -> Result<(BigUint, BigUint)> {
    if k == 0 {
        return Err(Error::InvalidInput("tree bounds need k >= 1".into()));
    }
    if k > n {
        return Ok((BigUint::one(), BigUint::one()));
    }
    let g = greedy_count(levels, n, k)?;
    let j = (n - k) as usize;
    let crude = levels.partial_sum(j);
    Ok((levels.level(j).clone(), g.min(crude)))
}

/// One depth-`n` descendant of each generation-`(n-k)` vertex, reached by
/// always taking the lowest-index child. Certified at `ell = 2k+1`.
pub fn tree_witness_set(tree: &RootedTree, k: u32) -> Result<WitnessSet> {
    let n = tree.height;
    if k == 0 || k > n {
        return Err(Error::Precondition(format!(
            "tree witnesses need 1 <= k <= n, got k={k} n={n}"
        )));
    }
    let mut witnesses = Vec::new();
    for seed in tree.generation(n - k) {
        let mut cur = seed;
        while tree.depth[cur] < n {
            cur = tree.children(cur).next().ok_or_else(|| {
                Error::Precondition(format!("vertex {cur} has no children below height {n}"))
            })?;
        }
        witnesses.push(cur);
    }
    verify_witness_set(&tree.graph, &witnesses, 2 * k + 1)
}

/// Natural logarithm of an arbitrarily large integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64-bit value").ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{min_boxes_exact, verify_cover, DEFAULT_NODE_BUDGET};

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn spherical_examples() {
        let (t, l) = build_spherical(&DegreeProfile::Constant(2), 3).unwrap();
        assert_eq!(t.num_vertices(), 15);
        assert_eq!(t.level_profile(), l);
        assert!(t.graph.is_tree());
        let (t, _) = build_spherical(&DegreeProfile::TwoThree, 3).unwrap();
        assert_eq!(t.num_vertices(), 21);
        let (t, l) = build_spherical(&DegreeProfile::TwoThree, 4).unwrap();
        assert_eq!((t.num_vertices(), l.level(4).clone()), (57, big(36)));
        assert!(matches!(
            build_spherical_with_budget(&DegreeProfile::Constant(3), 10, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn greedy_counts() {
        let l = level_sizes(&DegreeProfile::Constant(2), 4).unwrap();
        assert_eq!(greedy_count(&l, 4, 1).unwrap(), big(11));
        assert_eq!(greedy_count(&l, 4, 4).unwrap(), big(1));
        assert_eq!(greedy_count(&l, 4, 9).unwrap(), big(1));
        assert_eq!(tree_box_bounds(&l, 4, 1).unwrap(), (big(8), big(11)));
        assert_eq!(tree_box_bounds(&l, 4, 4).unwrap(), (big(1), big(1)));
        assert_eq!(tree_box_bounds(&l, 4, 7).unwrap(), (big(1), big(1)));
    }

    #[test]
    fn fig6_shape_boxes() {
        // n=4, k=1: boxes start at generations 3 and 1, plus the root box
        let (t, _) = build_spherical(&DegreeProfile::Finite(vec![2, 1, 2, 1]), 4).unwrap();
        let (cover, g) = greedy_tree_boxing(&t, 1).unwrap();
        verify_cover(&t.graph, &cover).unwrap();
        let starts: Vec<u32> = cover.boxes.iter().map(|b| t.depth[b[0]]).collect();
        assert_eq!(starts, vec![0, 1, 1, 3, 3, 3, 3]);
        assert_eq!(g, big(7));
    }

    #[test]
    fn binary_sandwich() {
        let (t, l) = build_spherical(&DegreeProfile::Constant(2), 4).unwrap();
        let (cover, g) = greedy_tree_boxing(&t, 1).unwrap();
        verify_cover(&t.graph, &cover).unwrap();
        assert_eq!(g, big(11));
        let exact = min_boxes_exact(&t.graph, 3, MetricMode::SubgraphDistance, DEFAULT_NODE_BUDGET).unwrap();
        let w = tree_witness_set(&t, 1).unwrap();
        let (lo, hi) = tree_box_bounds(&l, 4, 1).unwrap();
        assert_eq!(BigUint::from(w.lower_bound()), lo);
        assert!(w.lower_bound() <= exact.num_boxes());
        assert!(BigUint::from(exact.num_boxes()) <= hi);
    }

    #[test]
    fn childless_vertex_rejected() {
        let t = RootedTree::from_parents(vec![None, Some(0), Some(0), Some(1)]).unwrap();
        assert!(matches!(greedy_tree_boxing(&t, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn ln_big_matches_f64() {
        assert!((ln_big(&big(1000)) - 1000f64.ln()).abs() < 1e-12);
        let huge = BigUint::from(3u32).pow(2000);
        assert!((ln_big(&huge) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
