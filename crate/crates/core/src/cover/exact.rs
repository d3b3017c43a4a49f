//! Branch-and-bound search for a minimum ℓ-box partition.
//!
//! Vertices are assigned in index order. A vertex either joins an existing
//! box (in creation order) or opens a new one, so every partition is visited
//! at most once. Partial boxes are kept pairwise within ℓ−1 in the global
//! metric, which is necessary in both modes. In subgraph mode each box must
//! also stay completable: its members must be close inside the subgraph
//! spanned by the box and the unassigned vertices that could still join it.
//! Every box is checked again at the leaves.

use super::{greedy_boxing, greedy_boxing_in_order, BoxCover, CoverMethod};
use crate::error::Result;
use crate::graph::{check_box_args, is_ell_box_unchecked, DistanceMatrix, Graph, MetricMode};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Number of seeded greedy runs used for the initial incumbent.
const GREEDY_RESTARTS: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExactStats {
    pub nodes: u64,
    /// Largest witness lower bound found at the root.
    pub root_lower_bound: usize,
    pub budget_exhausted: bool,
}

/// Minimum number of ℓ-boxes partitioning `graph`.
///
/// If `budget` search nodes are exhausted, the best cover found so far is
/// returned with `optimal == false`.
pub fn min_boxes_exact(graph: &Graph, ell: u32, mode: MetricMode, budget: u64) -> Result<BoxCover> {
    Ok(min_boxes_exact_with_stats(graph, ell, mode, budget)?.0)
}

pub fn min_boxes_exact_with_stats(
    graph: &Graph,
    ell: u32,
    mode: MetricMode,
    budget: u64,
) -> Result<(BoxCover, ExactStats)> {
    check_box_args(graph, &[], ell)?;
    let n = graph.num_vertices();
    if n == 0 {
        let cover = BoxCover {
            ell,
            mode,
            boxes: Vec::new(),
            method: CoverMethod::Exact,
            optimal: true,
        };
        return Ok((cover, ExactStats::default()));
    }

    let dist = DistanceMatrix::new(graph);
    let mut incumbent = greedy_boxing_in_order(graph, ell, mode, &(0..n).collect::<Vec<_>>())?;
    for seed in 0..GREEDY_RESTARTS {
        let c = greedy_boxing(graph, ell, mode, seed)?;
        if c.num_boxes() < incumbent.num_boxes() {
            incumbent = c;
        }
    }
    for (m, outward_only) in [mode, MetricMode::SubgraphDistance]
        .into_iter()
        .flat_map(|m| [(m, false), (m, true)])
    {
        if let Some(boxes) = peripheral_ball_boxing(graph, &dist, ell, m, outward_only) {
            if boxes.len() < incumbent.num_boxes() {
                incumbent.boxes = boxes;
            }
        }
    }

    let mut search = Search {
        graph,
        dist: &dist,
        bound: ell - 1,
        ell,
        mode,
        boxes: Vec::new(),
        best: incumbent.boxes.clone(),
        nodes: 0,
        budget,
        exhausted: false,
        root_lb: 0,
    };
    let root_lb = search.root_lower_bound();
    search.root_lb = root_lb;
    let mut stats = ExactStats {
        root_lower_bound: root_lb,
        ..ExactStats::default()
    };
    if root_lb < search.best.len() {
        search.descend(0);
    }
    stats.nodes = search.nodes;
    stats.budget_exhausted = search.exhausted;

    let mut boxes = search.best;
    for b in &mut boxes {
        b.sort_unstable();
    }
    let optimal = !search.exhausted || root_lb == boxes.len();
    let cover = BoxCover {
        ell,
        mode,
        boxes,
        method: CoverMethod::Exact,
        optimal,
    };
    Ok((cover, stats))
}

/// Boxes grown from the outside in: the unassigned vertex farthest from a
/// centre picks an anchor `(ell-1)/2` steps closer to the centre, and the
/// box takes unassigned vertices near the anchor that keep it valid, those
/// lying beyond the anchor as seen from the centre first. Boxes grow through
/// adjacent vertices only. With
/// `outward_only` no other vertices are taken.
fn peripheral_ball_boxing(
    graph: &Graph,
    dist: &DistanceMatrix,
    ell: u32,
    mode: MetricMode,
    outward_only: bool,
) -> Option<Vec<Vec<usize>>> {
    if !graph.is_connected() {
        return None;
    }
    let n = graph.num_vertices();
    let d = |u: usize, v: usize| dist.get(u, v).expect("connected");
    let ecc = |u: usize| (0..n).map(|v| d(u, v)).max().unwrap_or(0);
    let centre = (0..n).min_by_key(|&u| (ecc(u), u))?;
    let radius = (ell - 1) / 2;
    let mut assigned = vec![false; n];
    let mut boxes = Vec::new();
    while let Some(u) = (0..n)
        .filter(|&v| !assigned[v])
        .max_by_key(|&v| (d(centre, v), std::cmp::Reverse(v)))
    {
        let mut anchor = u;
        for _ in 0..radius {
            let here = d(centre, anchor);
            if here == 0 {
                break;
            }
            anchor = graph
                .neighbors(anchor)
                .iter()
                .copied()
                .find(|&w| d(centre, w) == here - 1)?;
        }
        let mut near: Vec<usize> = (0..n)
            .filter(|&v| !assigned[v] && v != u && dist.within(anchor, v, radius))
            .collect();
        let depth = d(centre, anchor);
        let beyond = |v: usize| d(centre, v) == depth + d(anchor, v);
        if outward_only {
            near.retain(|&v| beyond(v));
        }
        near.sort_by_key(|&v| (!beyond(v), d(anchor, v), v));
        let mut b = vec![u];
        let mut added = true;
        while added {
            added = false;
            for v in near.iter_mut() {
                if *v == usize::MAX
                    || !graph.neighbors(*v).iter().any(|w| b.contains(w))
                    || !b.iter().all(|&w| dist.within(*v, w, ell - 1))
                {
                    continue;
                }
                b.push(*v);
                if mode == MetricMode::SubgraphDistance && !is_ell_box_unchecked(graph, &b, ell, mode) {
                    b.pop();
                    continue;
                }
                *v = usize::MAX;
                added = true;
            }
        }
        for &v in &b {
            assigned[v] = true;
        }
        boxes.push(b);
    }
    Some(boxes)
}

struct Search<'a> {
    graph: &'a Graph,
    dist: &'a DistanceMatrix,
    bound: u32,
    ell: u32,
    mode: MetricMode,
    boxes: Vec<Vec<usize>>,
    best: Vec<Vec<usize>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    root_lb: usize,
}

impl Search<'_> {
    fn n(&self) -> usize {
        self.dist.num_vertices()
    }

    fn fits(&self, v: usize, b: &[usize]) -> bool {
        b.iter().all(|&u| self.dist.within(u, v, self.bound))
    }

    /// Largest pairwise-far vertex set found by greedy scans in a few orders.
    fn root_lower_bound(&self) -> usize {
        let n = self.n();
        let mut orders: Vec<Vec<usize>> = vec![(0..n).collect(), (0..n).rev().collect()];
        let mut by_degree: Vec<usize> = (0..n).collect();
        by_degree.sort_by_key(|&v| (self.graph.degree(v), v));
        orders.push(by_degree);
        for start in 0..n.min(32) {
            orders.push((0..n).map(|i| (i + start * 7) % n).collect());
        }
        orders
            .iter()
            .map(|order| self.far_set(order.iter().copied(), |_| true).len())
            .max()
            .unwrap_or(0)
    }

    /// Greedily collects vertices that pass `admit` and are pairwise at
    /// distance >= ell.
    fn far_set(&self, candidates: impl Iterator<Item = usize>, admit: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        for u in candidates {
            if admit(u) && chosen.iter().all(|&w| !self.dist.within(u, w, self.bound)) {
                chosen.push(u);
            }
        }
        chosen
    }

    /// Unassigned vertices that fit no existing box and are pairwise far each
    /// need their own new box.
    fn lower_bound(&self, next: usize) -> usize {
        let extra = self
            .far_set(next..self.n(), |u| self.boxes.iter().all(|b| !self.fits(u, b)))
            .len();
        self.boxes.len() + extra
    }

    /// In subgraph mode, every box must still be able to become valid: its
    /// members have to be within `ell - 1` of each other inside the subgraph
    /// induced by the box and the unassigned vertices that could still join.
    fn boxes_completable(&self, next: usize) -> bool {
        if self.mode == MetricMode::GlobalDistance {
            return true;
        }
        self.boxes.iter().all(|b| self.completable(b, next))
    }

    fn completable(&self, b: &[usize], next: usize) -> bool {
        if b.len() < 2 {
            return true;
        }
        let n = self.n();
        let mut allowed = vec![false; n];
        for &u in b {
            allowed[u] = true;
        }
        for (w, a) in allowed.iter_mut().enumerate().skip(next) {
            if self.fits(w, b) {
                *a = true;
            }
        }
        let mut dist = vec![u32::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        for (i, &src) in b.iter().enumerate().take(b.len() - 1) {
            dist.iter_mut().for_each(|d| *d = u32::MAX);
            dist[src] = 0;
            queue.clear();
            queue.push_back(src);
            while let Some(u) = queue.pop_front() {
                if dist[u] >= self.bound {
                    continue;
                }
                for &w in self.graph.neighbors(u) {
                    if allowed[w] && dist[w] == u32::MAX {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if b[i + 1..].iter().any(|&t| dist[t] == u32::MAX) {
                return false;
            }
        }
        true
    }

    fn descend(&mut self, v: usize) {
        if self.exhausted || self.best.len() <= self.root_lb {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if v == self.n() {
            let valid = self.mode == MetricMode::GlobalDistance
                || self
                    .boxes
                    .iter()
                    .all(|b| is_ell_box_unchecked(self.graph, b, self.ell, self.mode));
            if valid && self.boxes.len() < self.best.len() {
                self.best = self.boxes.clone();
            }
            return;
        }
        if self.lower_bound(v) >= self.best.len() {
            return;
        }
        for i in 0..self.boxes.len() {
            if !self.fits(v, &self.boxes[i]) {
                continue;
            }
            self.boxes[i].push(v);
            if self.boxes_completable(v + 1) {
                self.descend(v + 1);
            }
            self.boxes[i].pop();
            if self.exhausted || self.best.len() <= self.root_lb {
                return;
            }
        }
        if self.boxes.len() + 1 < self.best.len() {
            self.boxes.push(vec![v]);
            if self.boxes_completable(v + 1) {
                self.descend(v + 1);
            }
            self.boxes.pop();
        }
    }
}
