//! Box coverings: partitions of a graph's vertices into ℓ-boxes, the
//! greedy heuristic, witness-set lower bounds and cover verification.

mod exact;
mod format;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::graph::{check_box_args, is_ell_box_unchecked, Graph, MetricMode};

pub use exact::{min_boxes_exact, min_boxes_exact_with_stats, ExactStats, DEFAULT_NODE_BUDGET};
pub use format::{parse_cover, write_cover};

/// How a cover was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverMethod {
    Exact,
    Greedy,
    Constructive,
}

impl CoverMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoverMethod::Exact => "exact",
            CoverMethod::Greedy => "greedy",
            CoverMethod::Constructive => "constructive",
        }
    }
}

impl fmt::Display for CoverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A partition of the vertex set into ℓ-boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxCover {
    pub ell: u32,
    pub mode: MetricMode,
    /// Boxes in creation order; vertices inside a box are sorted.
    pub boxes: Vec<Vec<usize>>,
    pub method: CoverMethod,
    /// For exact covers: the search finished, or the lower bound was met.
    pub optimal: bool,
}

impl BoxCover {
    pub fn num_boxes(&self) -> usize {
        self.boxes.len()
    }

    /// Box index of every vertex, for a cover of a graph on `n` vertices.
    pub fn assignment(&self, n: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; n];
        for (i, b) in self.boxes.iter().enumerate() {
            for &v in b {
                if v < n {
                    owner[v] = Some(i);
                }
            }
        }
        owner
    }
}

/// First violated condition found by [`verify_cover`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("box size ell must be >= 2, got {0}")]
    BadEll(u32),
    #[error("box {0} is empty")]
    EmptyBox(usize),
    #[error("vertex {vertex} in box {box_index} is outside the graph")]
    OutOfRange { vertex: usize, box_index: usize },
    #[error("vertex {vertex} appears in boxes {first} and {second}")]
    Overlap {
        vertex: usize,
        first: usize,
        second: usize,
    },
    #[error("vertex {0} is not covered")]
    Omission(usize),
    #[error("box {0} is not an {1}-box")]
    Oversized(usize, u32),
}

/// Checks that `cover` partitions the vertex set and that every box is an
/// ℓ-box under the cover's metric mode.
pub fn verify_cover(graph: &Graph, cover: &BoxCover) -> std::result::Result<(), CoverError> {
    if cover.ell < 2 {
        return Err(CoverError::BadEll(cover.ell));
    }
    let n = graph.num_vertices();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, b) in cover.boxes.iter().enumerate() {
        if b.is_empty() {
            return Err(CoverError::EmptyBox(i));
        }
        for &v in b {
            if v >= n {
                return Err(CoverError::OutOfRange {
                    vertex: v,
                    box_index: i,
                });
            }
            if let Some(first) = owner[v] {
                return Err(CoverError::Overlap {
                    vertex: v,
                    first,
                    second: i,
                });
            }
            owner[v] = Some(i);
        }
    }
    if let Some(v) = owner.iter().position(|o| o.is_none()) {
        return Err(CoverError::Omission(v));
    }
    for (i, b) in cover.boxes.iter().enumerate() {
        if !is_ell_box_unchecked(graph, b, cover.ell, cover.mode) {
            return Err(CoverError::Oversized(i, cover.ell));
        }
    }
    Ok(())
}

pub fn is_valid_cover(graph: &Graph, cover: &BoxCover) -> bool {
    verify_cover(graph, cover).is_ok()
}

/// Vertices with a certified lower bound on their pairwise distances.
///
/// `min_pairwise_distance` is `None` when there is no pair to measure, or
/// when no two witnesses are connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSet {
    pub vertices: Vec<usize>,
    pub min_pairwise_distance: Option<u32>,
}

impl WitnessSet {
    /// The number of boxes any ℓ-cover needs, in either metric mode.
    pub fn lower_bound(&self) -> usize {
        self.vertices.len()
    }
}

/// Exact closest pair among `sources` by multi-source BFS.
///
/// Every vertex is claimed by its nearest source; the closest pair of
/// sources is realized across some edge whose endpoints have different
/// owners.
pub fn closest_pair(graph: &Graph, sources: &[usize]) -> Option<(usize, usize, u32)> {
    let n = graph.num_vertices();
    let mut dist = vec![u32::MAX; n];
    let mut owner = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(sources.len());
    for &s in sources {
        dist[s] = 0;
        owner[s] = s;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for &w in graph.neighbors(u) {
            if dist[w] == u32::MAX {
                dist[w] = dist[u] + 1;
                owner[w] = owner[u];
                queue.push_back(w);
            }
        }
    }
    let mut best: Option<(usize, usize, u32)> = None;
    for u in 0..n {
        if dist[u] == u32::MAX {
            continue;
        }
        for &w in graph.neighbors(u) {
            if w < u || owner[w] == owner[u] || dist[w] == u32::MAX {
                continue;
            }
            let d = dist[u] + dist[w] + 1;
            let (a, b) = if owner[u] < owner[w] {
                (owner[u], owner[w])
            } else {
                (owner[w], owner[u])
            };
            let better = match best {
                None => true,
                Some((ba, bb, bd)) => (d, a, b) < (bd, ba, bb),
            };
            if better {
                best = Some((a, b, d));
            }
        }
    }
    best
}

/// Certifies that the given vertices are pairwise at graph distance at least
/// `ell`, so no two of them can share an ℓ-box.
pub fn verify_witness_set(graph: &Graph, vertices: &[usize], ell: u32) -> Result<WitnessSet> {
    check_box_args(graph, vertices, ell)?;
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput(format!("witness {} listed twice", w[0])));
    }
    let closest = closest_pair(graph, vertices);
    if let Some((u, v, d)) = closest {
        if d < ell {
            return Err(Error::WitnessRejected {
                u,
                v,
                distance: d,
                ell,
            });
        }
    }
    Ok(WitnessSet {
        vertices: vertices.to_vec(),
        min_pairwise_distance: closest.map(|(_, _, d)| d),
    })
}

/// Vertices within `radius` of `source`, with their distances.
fn ball(graph: &Graph, source: usize, radius: u32) -> HashMap<usize, u32> {
    let mut seen = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(source, 0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = seen[&u];
        if du == radius {
            continue;
        }
        for &w in graph.neighbors(u) {
            seen.entry(w).or_insert_with(|| {
                queue.push_back(w);
                du + 1
            });
        }
    }
    seen
}

/// Seeded first-fit boxing.
///
/// Vertices are visited in a random order drawn from `seed`; each joins the
/// first box (in creation order) that is still an ℓ-box with it added,
/// otherwise it opens a new box.
pub fn greedy_boxing(graph: &Graph, ell: u32, mode: MetricMode, seed: u64) -> Result<BoxCover> {
    let mut order: Vec<usize> = (0..graph.num_vertices()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    greedy_boxing_in_order(graph, ell, mode, &order)
}

/// First-fit boxing over an explicit vertex order.
pub fn greedy_boxing_in_order(
    graph: &Graph,
    ell: u32,
    mode: MetricMode,
    order: &[usize],
) -> Result<BoxCover> {
    check_box_args(graph, order, ell)?;
    let bound = ell - 1;
    let mut boxes: Vec<Vec<usize>> = Vec::new();
    for &v in order {
        let near = ball(graph, v, bound);
        let target = boxes.iter().position(|b| {
            if !b.iter().all(|u| near.contains_key(u)) {
                return false;
            }
            match mode {
                MetricMode::GlobalDistance => true,
                MetricMode::SubgraphDistance => {
                    let mut candidate = b.clone();
                    candidate.push(v);
                    is_ell_box_unchecked(graph, &candidate, ell, mode)
                }
            }
        });
        match target {
            Some(i) => boxes[i].push(v),
            None => boxes.push(vec![v]),
        }
    }
    for b in &mut boxes {
        b.sort_unstable();
    }
    Ok(BoxCover {
        ell,
        mode,
        boxes,
        method: CoverMethod::Greedy,
        optimal: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn greedy_on_complete_graph_is_one_box() {
        let c = greedy_boxing(&complete(5), 2, MetricMode::GlobalDistance, 3).unwrap();
        assert_eq!(c.num_boxes(), 1);
        verify_cover(&complete(5), &c).unwrap();
    }

    #[test]
    fn greedy_on_path_reaches_interval_bound() {
        let g = path(7);
        let counts: Vec<usize> = (0..64)
            .map(|s| greedy_boxing(&g, 3, MetricMode::GlobalDistance, s).unwrap().num_boxes())
            .collect();
        assert!(counts.iter().all(|&c| c >= 3));
        assert!(counts.contains(&3));
    }

    #[test]
    fn greedy_is_deterministic_per_seed() {
        let g = path(12);
        let a = greedy_boxing(&g, 3, MetricMode::SubgraphDistance, 9).unwrap();
        let b = greedy_boxing(&g, 3, MetricMode::SubgraphDistance, 9).unwrap();
        assert_eq!(a, b);
        verify_cover(&g, &a).unwrap();
    }

    #[test]
    fn verify_cover_reports_first_violation() {
        let g = path(3);
        let mut cover = BoxCover {
            ell: 2,
            mode: MetricMode::GlobalDistance,
            boxes: vec![vec![0, 1], vec![1, 2]],
            method: CoverMethod::Constructive,
            optimal: false,
        };
        assert_eq!(
            verify_cover(&g, &cover),
            Err(CoverError::Overlap {
                vertex: 1,
                first: 0,
                second: 1
            })
        );
        cover.boxes = vec![vec![0, 1]];
        assert_eq!(verify_cover(&g, &cover), Err(CoverError::Omission(2)));
        cover.boxes = vec![vec![0, 2], vec![1]];
        assert_eq!(verify_cover(&g, &cover), Err(CoverError::Oversized(0, 2)));
        cover.boxes = vec![vec![0, 1], vec![2]];
        assert!(is_valid_cover(&g, &cover));
    }

    #[test]
    fn witness_checks() {
        let g = path(5);
        let w = verify_witness_set(&g, &[0, 3], 3).unwrap();
        assert_eq!(w.min_pairwise_distance, Some(3));
        match verify_witness_set(&g, &[1, 2], 3) {
            Err(Error::WitnessRejected { u: 1, v: 2, distance: 1, ell: 3 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let single = verify_witness_set(&g, &[4], 7).unwrap();
        assert_eq!(single.lower_bound(), 1);
        assert_eq!(single.min_pairwise_distance, None);
    }

    #[test]
    fn closest_pair_matches_pairwise_bfs() {
        let g = Graph::from_edges(
            8,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 0), (2, 6)],
        )
        .unwrap();
        let sources = [0, 3, 5];
        let (_, _, d) = closest_pair(&g, &sources).unwrap();
        let mut brute = u32::MAX;
        for (i, &a) in sources.iter().enumerate() {
            let da = crate::graph::bfs_distances(&g, a).unwrap();
            for &b in &sources[i + 1..] {
                brute = brute.min(da[b].unwrap());
            }
        }
        assert_eq!(d, brute);
    }
}
