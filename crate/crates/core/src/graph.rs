//! Undirected simple graphs, the shortest-path metric, and the ℓ-box predicate.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Which metric a box's diameter is measured in.
///
/// `SubgraphDistance` measures distances inside the induced subgraph of the
/// box, so a box whose induced subgraph is disconnected is never valid.
/// `GlobalDistance` uses the ambient graph metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricMode {
    GlobalDistance,
    SubgraphDistance,
}

impl MetricMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetricMode::GlobalDistance => "global",
            MetricMode::SubgraphDistance => "subgraph",
        }
    }
}

impl fmt::Display for MetricMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" | "GlobalDistance" => Ok(MetricMode::GlobalDistance),
            "subgraph" | "SubgraphDistance" => Ok(MetricMode::SubgraphDistance),
            other => Err(Error::InvalidInput(format!("unknown metric mode '{other}'"))),
        }
    }
}

/// Immutable undirected simple graph on vertices `0..n`.
///
/// Adjacency lists are sorted, so `neighbors` iterates in increasing order
/// and `has_edge` is a binary search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    num_edges: usize,
    labels: Vec<Option<String>>,
}

/// Accumulates edges and labels, then freezes into a [`Graph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    adjacency: Vec<Vec<usize>>,
    labels: Vec<Option<String>>,
}

impl GraphBuilder {
    pub fn new(num_vertices: usize) -> Self {
        GraphBuilder {
            adjacency: vec![Vec::new(); num_vertices],
            labels: vec![None; num_vertices],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    /// Appends a fresh vertex and returns its index.
    pub fn add_vertex(&mut self) -> usize {
        self.adjacency.push(Vec::new());
        self.labels.push(None);
        self.adjacency.len() - 1
    }

    /// Adds the undirected edge `{u, v}`. Duplicates are merged on freeze.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.adjacency.len();
        if u >= n || v >= n {
            return Err(Error::InvalidInput(format!(
                "edge ({u}, {v}) has an endpoint outside 0..{n}"
            )));
        }
        if u == v {
            return Err(Error::InvalidInput(format!("loop at vertex {u} is not allowed")));
        }
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
        Ok(())
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<String>) -> Result<()> {
        let n = self.labels.len();
        let slot = self
            .labels
            .get_mut(v)
            .ok_or_else(|| Error::InvalidInput(format!("label for vertex {v} outside 0..{n}")))?;
        *slot = Some(label.into());
        Ok(())
    }

    pub fn freeze(mut self) -> Graph {
        let mut twice = 0;
        for list in &mut self.adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Graph {
            adjacency: self.adjacency,
            num_edges: twice / 2,
            labels: self.labels,
        }
    }
}

impl Graph {
    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut b = GraphBuilder::new(num_vertices);
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.freeze())
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adjacency.len() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.get(v).and_then(|l| l.as_deref())
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// Finds the vertex carrying `label`, if any.
    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.as_deref() == Some(label))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        bfs_unchecked(self, 0).iter().all(|d| d.is_some())
    }

    pub fn is_tree(&self) -> bool {
        self.num_vertices() >= 1 && self.num_edges + 1 == self.num_vertices() && self.is_connected()
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.num_vertices() {
            return Err(Error::InvalidInput(format!(
                "vertex {v} outside 0..{}",
                self.num_vertices()
            )));
        }
        Ok(())
    }
}

/// Shortest-path distances from `source`; `None` marks unreachable vertices.
pub fn bfs_distances(graph: &Graph, source: usize) -> Result<Vec<Option<u32>>> {
    graph.check_vertex(source)?;
    Ok(bfs_unchecked(graph, source))
}

fn bfs_unchecked(graph: &Graph, source: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; graph.num_vertices()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &w in graph.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Farthest vertex from `source` and its distance, or the first unreachable one.
fn eccentricity(graph: &Graph, source: usize) -> std::result::Result<(usize, u32), usize> {
    let dist = bfs_unchecked(graph, source);
    let mut far = (source, 0);
    for (v, d) in dist.iter().enumerate() {
        match d {
            None => return Err(v),
            Some(d) if *d > far.1 => far = (v, *d),
            _ => {}
        }
    }
    Ok(far)
}

/// Diameter of a connected graph.
///
/// Trees use two BFS sweeps; everything else runs a BFS from every source.
pub fn diameter(graph: &Graph) -> Result<u32> {
    let n = graph.num_vertices();
    if n == 0 {
        return Ok(0);
    }
    if graph.num_edges() + 1 == n {
        let (a, _) = eccentricity(graph, 0).map_err(|v| Error::Disconnected(0, v))?;
        let (_, d) = eccentricity(graph, a).map_err(|v| Error::Disconnected(a, v))?;
        return Ok(d);
    }
    diameter_all_sources(graph)
}

/// Diameter as the maximum eccentricity over all BFS sources.
pub fn diameter_all_sources(graph: &Graph) -> Result<u32> {
    let results: Vec<std::result::Result<u32, (usize, usize)>> = (0..graph.num_vertices())
        .into_par_iter()
        .map(|s| eccentricity(graph, s).map(|(_, d)| d).map_err(|v| (s, v)))
        .collect();
    let mut best = 0;
    for r in results {
        match r {
            Ok(d) => best = best.max(d),
            Err((u, v)) => return Err(Error::Disconnected(u, v)),
        }
    }
    Ok(best)
}

/// All-pairs distance table for small graphs.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    // u32::MAX marks "unreachable"; never exposed directly.
    data: Vec<u32>,
}

const UNREACHABLE: u32 = u32::MAX;

impl DistanceMatrix {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.num_vertices();
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|s| {
                bfs_unchecked(graph, s)
                    .into_iter()
                    .map(|d| d.unwrap_or(UNREACHABLE))
                    .collect()
            })
            .collect();
        DistanceMatrix {
            n,
            data: rows.concat(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        let d = self.data[u * self.n + v];
        (d != UNREACHABLE).then_some(d)
    }

    /// True iff `d(u, v) <= bound`. Unreachable pairs never qualify.
    #[inline]
    pub fn within(&self, u: usize, v: usize, bound: u32) -> bool {
        self.data[u * self.n + v] <= bound
    }
}

/// Checks that `ell >= 2` and every listed vertex is in range.
pub(crate) fn check_box_args(graph: &Graph, vertices: &[usize], ell: u32) -> Result<()> {
    if ell < 2 {
        return Err(Error::InvalidInput(format!("box size ell must be >= 2, got {ell}")));
    }
    for &v in vertices {
        graph.check_vertex(v)?;
    }
    Ok(())
}

/// Whether `vertices` forms an ℓ-box of `graph` under `mode`.
pub fn is_ell_box(graph: &Graph, vertices: &[usize], ell: u32, mode: MetricMode) -> Result<bool> {
    check_box_args(graph, vertices, ell)?;
    Ok(is_ell_box_unchecked(graph, vertices, ell, mode))
}

pub(crate) fn is_ell_box_unchecked(
    graph: &Graph,
    vertices: &[usize],
    ell: u32,
    mode: MetricMode,
) -> bool {
    if vertices.len() <= 1 {
        return true;
    }
    let bound = ell - 1;
    match mode {
        MetricMode::GlobalDistance => global_box(graph, vertices, bound),
        MetricMode::SubgraphDistance => {
            let (sub, _) = induced_unchecked(graph, vertices);
            (0..sub.num_vertices()).all(|s| {
                bfs_unchecked(&sub, s)
                    .iter()
                    .all(|d| matches!(d, Some(d) if *d <= bound))
            })
        }
    }
}

/// Depth-limited BFS from every member: each other member must be reached
/// within `bound` steps.
fn global_box(graph: &Graph, vertices: &[usize], bound: u32) -> bool {
    let mut member = std::collections::HashSet::with_capacity(vertices.len());
    member.extend(vertices.iter().copied());
    let mut seen: std::collections::HashMap<usize, u32> = std::collections::HashMap::new();
    let mut queue = VecDeque::new();
    for &s in vertices {
        seen.clear();
        queue.clear();
        seen.insert(s, 0);
        queue.push_back(s);
        let mut found = 1;
        while let Some(u) = queue.pop_front() {
            let du = seen[&u];
            if du == bound {
                continue;
            }
            for &w in graph.neighbors(u) {
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(w) {
                    e.insert(du + 1);
                    if member.contains(&w) {
                        found += 1;
                    }
                    queue.push_back(w);
                }
            }
        }
        if found < member.len() {
            return false;
        }
    }
    true
}

/// Subgraph induced by `vertices`, reindexed to `0..k` in the given order.
///
/// Returns the subgraph and the index map (`map[i]` is the original vertex
/// of new vertex `i`). Labels are carried over.
pub fn induced_subgraph(graph: &Graph, vertices: &[usize]) -> Result<(Graph, Vec<usize>)> {
    for &v in vertices {
        graph.check_vertex(v)?;
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("vertex set contains duplicates".into()));
    }
    Ok(induced_unchecked(graph, vertices))
}

fn induced_unchecked(graph: &Graph, vertices: &[usize]) -> (Graph, Vec<usize>) {
    let index: std::collections::HashMap<usize, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut b = GraphBuilder::new(vertices.len());
    for (i, &v) in vertices.iter().enumerate() {
        for w in graph.neighbors(v) {
            if let Some(&j) = index.get(w) {
                if i < j {
                    b.adjacency[i].push(j);
                    b.adjacency[j].push(i);
                }
            }
        }
        if let Some(l) = graph.label(v) {
            b.labels[i] = Some(l.to_string());
        }
    }
    (b.freeze(), vertices.to_vec())
}
