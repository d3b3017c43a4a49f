#![allow(dead_code)]

use std::collections::VecDeque;

use rand::Rng;
use transfractal::{Graph, MetricMode};

/// All-pairs BFS distances over `adj`, `None` for unreachable pairs.
pub fn all_pairs(adj: &[Vec<usize>]) -> Vec<Vec<Option<u32>>> {
    (0..adj.len()).map(|s| bfs(adj, s, None)).collect()
}

/// BFS from `s`, optionally restricted to vertices with `allowed[v]`.
pub fn bfs(adj: &[Vec<usize>], s: usize, allowed: Option<&[bool]>) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &w in &adj[u] {
            if dist[w].is_none() && allowed.is_none_or(|a| a[w]) {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn adjacency(graph: &Graph) -> Vec<Vec<usize>> {
    (0..graph.num_vertices()).map(|v| graph.neighbors(v).to_vec()).collect()
}

pub fn bfs_diameter(graph: &Graph) -> u32 {
    let adj = adjacency(graph);
    (0..adj.len())
        .map(|s| bfs(&adj, s, None).into_iter().map(|d| d.expect("connected")).max().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// Whether the vertex set `mask` is an `ell`-box.
pub fn is_box(adj: &[Vec<usize>], global: &[Vec<Option<u32>>], mask: u32, ell: u32, mode: MetricMode) -> bool {
    let members: Vec<usize> = (0..adj.len()).filter(|&v| mask >> v & 1 == 1).collect();
    let allowed: Vec<bool> = (0..adj.len()).map(|v| mask >> v & 1 == 1).collect();
    members.iter().all(|&u| {
        let d = match mode {
            MetricMode::GlobalDistance => global[u].clone(),
            MetricMode::SubgraphDistance => bfs(adj, u, Some(&allowed)),
        };
        members.iter().all(|&v| matches!(d[v], Some(x) if x < ell))
    })
}

/// Minimum number of boxes over every set partition of the vertices,
/// enumerated as restricted growth strings. Needs at most 16 vertices.
pub fn brute_force_min_boxes(graph: &Graph, ell: u32, mode: MetricMode) -> usize {
    let n = graph.num_vertices();
    assert!(n <= 16);
    if n == 0 {
        return 0;
    }
    let adj = adjacency(graph);
    let global = all_pairs(&adj);
    let valid: Vec<bool> = (0..1u32 << n).map(|m| m == 0 || is_box(&adj, &global, m, ell, mode)).collect();

    let mut best = n;
    let mut blocks: Vec<u32> = Vec::new();
    fn rec(v: usize, n: usize, blocks: &mut Vec<u32>, valid: &[bool], best: &mut usize) {
        if v == n {
            if blocks.iter().all(|&b| valid[b as usize]) {
                *best = (*best).min(blocks.len());
            }
            return;
        }
        for i in 0..blocks.len() {
            blocks[i] |= 1 << v;
            rec(v + 1, n, blocks, valid, best);
            blocks[i] &= !(1 << v);
        }
        blocks.push(1 << v);
        rec(v + 1, n, blocks, valid, best);
        blocks.pop();
    }
    rec(0, n, &mut blocks, &valid, &mut best);
    best
}

/// Connected graph on `n` vertices: a random tree plus each other edge with
/// probability `p`.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !edges.contains(&(u, v)) && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}
