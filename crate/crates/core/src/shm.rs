//! Song–Havlin–Makse growth with rewiring.
//!
//! Each step attaches `m * deg(v)` new leaves to every vertex `v`, then keeps
//! each pre-existing edge with probability `p` and otherwise replaces `(u, v)`
//! by an edge between a uniformly chosen new child of `u` and one of `v`.

use rand::Rng;

use crate::cover::{verify_witness_set, BoxCover, CoverMethod, WitnessSet};
use crate::error::{Error, Result};
use crate::graph::{diameter, Graph, MetricMode};
use crate::rng::rng_from_seed;

pub const DEFAULT_SHM_VERTEX_BUDGET: usize = 1 << 21;

/// Snapshot of the process after `step` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ShmState {
    pub graph: Graph,
    pub birth_time: Vec<u32>,
    /// Vertex each leaf was attached to when it was born.
    pub parent: Vec<Option<usize>>,
    pub m: usize,
    pub p: f64,
    pub step: u32,
    pub rng_seed: u64,
    pub initial_diameter: u32,
    pub initial_is_tree: bool,
}

impl ShmState {
    /// Number of vertices present at step `t`.
    pub fn vertices_at(&self, t: u32) -> usize {
        self.birth_time.iter().filter(|&&b| b <= t).count()
    }

    /// Children of every vertex, ascending.
    fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.graph.num_vertices()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                out[*p].push(v);
            }
        }
        out
    }
}

/// Evolution stopped by the vertex budget; `completed` holds every snapshot
/// produced before the failing step.
#[derive(Debug, thiserror::Error)]
#[error("{source} (after {} completed snapshots)", completed.len())]
pub struct ShmEvolveError {
    pub completed: Vec<ShmState>,
    #[source]
    pub source: Error,
}

impl From<ShmEvolveError> for Error {
    fn from(e: ShmEvolveError) -> Error {
        e.source
    }
}

/// Exact `(V(n), E(n))` from `V(n) = V(n-1) + 2m E(n-1)`, `E(n) = (2m+1) E(n-1)`.
pub fn shm_counts(v0: u128, e0: u128, m: u128, n: u32) -> Result<(u128, u128)> {
    if v0 == 0 || e0 == 0 {
        return Err(Error::InvalidInput("v0 and e0 must be at least 1".into()));
    }
    let overflow = || Error::InvalidInput(format!("SHM counts overflow at n={n}"));
    let (mut v, mut e) = (v0, e0);
    for _ in 0..n {
        v = e
            .checked_mul(2 * m)
            .and_then(|x| x.checked_add(v))
            .ok_or_else(overflow)?;
        e = e.checked_mul(2 * m + 1).ok_or_else(overflow)?;
    }
    Ok((v, e))
}

/// Box size at scale `k`: `diam(SHM_0) + 2k + 1`.
pub fn shm_ell(initial_diameter: u32, k: u32) -> u32 {
    initial_diameter + 2 * k + 1
}

/// `(lower, upper)` counts bracketing `N_B(shm_ell(k))` at step `n` for `p = 1`:
/// `V(n - k - ceil(d0/2))` and `V(n - k - 1)`.
pub fn shm_box_bounds(v0: u128, e0: u128, m: u128, d0: u32, n: u32, k: u32) -> Result<(u128, u128)> {
    let h = d0.div_ceil(2);
    if n < k + h.max(1) {
        return Err(Error::Precondition(format!(
            "bounds need n >= k + max(1, ceil(d0/2)), got n={n} k={k} d0={d0}"
        )));
    }
    let lower = shm_counts(v0, e0, m, n - k - h)?.0;
    let upper = shm_counts(v0, e0, m, n - k - 1)?.0;
    Ok((lower, upper))
}

pub fn shm_evolve(
    initial: &Graph,
    m: usize,
    p: f64,
    steps: u32,
    seed: u64,
) -> Result<Vec<ShmState>, ShmEvolveError> {
    shm_evolve_with_budget(initial, m, p, steps, seed, DEFAULT_SHM_VERTEX_BUDGET)
}

pub fn shm_evolve_with_budget(
    initial: &Graph,
    m: usize,
    p: f64,
    steps: u32,
    seed: u64,
    budget: usize,
) -> Result<Vec<ShmState>, ShmEvolveError> {
    let fail = |completed: Vec<ShmState>, source: Error| ShmEvolveError { completed, source };
    if m < 1 {
        return Err(fail(Vec::new(), Error::InvalidInput("m must be at least 1".into())));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(fail(Vec::new(), Error::InvalidInput(format!("p={p} is not a probability"))));
    }
    if initial.num_vertices() < 2 {
        return Err(fail(Vec::new(), Error::InvalidInput("initial graph needs at least 2 vertices".into())));
    }
    let d0 = diameter(initial).map_err(|e| fail(Vec::new(), e))?;

    let mut rng = rng_from_seed(seed);
    let mut edges: Vec<(usize, usize)> = initial.edges().collect();
    let mut birth = vec![0u32; initial.num_vertices()];
    let mut parent: Vec<Option<usize>> = vec![None; initial.num_vertices()];
    let snapshot = |edges: &[(usize, usize)], birth: &[u32], parent: &[Option<usize>], step: u32| ShmState {
        graph: Graph::from_edges(birth.len(), edges).expect("edges are in range"),
        birth_time: birth.to_vec(),
        parent: parent.to_vec(),
        m,
        p,
        step,
        rng_seed: seed,
        initial_diameter: d0,
        initial_is_tree: initial.is_tree(),
    };
    let mut out = vec![snapshot(&edges, &birth, &parent, 0)];

    for step in 1..=steps {
        let v_old = birth.len();
        let needed = (edges.len() as u128) * 2 * m as u128 + v_old as u128;
        if needed > budget as u128 {
            return Err(fail(out, Error::BudgetExceeded { needed, budget }));
        }
        let mut degree = vec![0usize; v_old];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let old_edges = std::mem::take(&mut edges);
        let mut fresh: Vec<Vec<usize>> = vec![Vec::new(); v_old];
        for v in 0..v_old {
            for _ in 0..m * degree[v] {
                let w = birth.len();
                birth.push(step);
                parent.push(Some(v));
                fresh[v].push(w);
                edges.push((v, w));
            }
        }
        let mut rewired = std::collections::HashSet::new();
        for (u, v) in old_edges {
            let keep = p >= 1.0 || (p > 0.0 && rng.gen_bool(p));
            if keep {
                edges.push((u, v));
                continue;
            }
            loop {
                let a = fresh[u][rng.gen_range(0..fresh[u].len())];
                let b = fresh[v][rng.gen_range(0..fresh[v].len())];
                if rewired.insert((a.min(b), a.max(b))) {
                    edges.push((a, b));
                    break;
                }
            }
        }
        out.push(snapshot(&edges, &birth, &parent, step));
    }
    Ok(out)
}

fn require_p_one(state: &ShmState) -> Result<()> {
    if state.p != 1.0 {
        return Err(Error::Unsupported(format!(
            "SHM boxing bounds need p = 1, got p = {}",
            state.p
        )));
    }
    Ok(())
}

/// Boxes centred on the vertices present at step `n - k - 1`, each holding
/// its later descendants. Valid at `shm_ell(k)` when the initial graph is a
/// tree with diameter at least 2.
pub fn shm_center_boxing(state: &ShmState, k: u32) -> Result<BoxCover> {
    require_p_one(state)?;
    if !state.initial_is_tree || state.initial_diameter < 2 {
        return Err(Error::Precondition(format!(
            "center boxing needs a tree initial graph with diameter >= 2 (tree: {}, diameter: {})",
            state.initial_is_tree, state.initial_diameter
        )));
    }
    let ell = shm_ell(state.initial_diameter, k);
    let total = state.graph.num_vertices();
    let boxes = if state.step < k + 1 {
        vec![(0..total).collect()]
    } else {
        let s = state.step - k - 1;
        let mut index = vec![usize::MAX; total];
        let mut boxes: Vec<Vec<usize>> = Vec::new();
        for (v, &born) in state.birth_time.iter().enumerate() {
            if born <= s {
                index[v] = boxes.len();
                boxes.push(vec![v]);
            }
        }
        // parents are always born earlier, so one pass in index order works
        for v in 0..total {
            if state.birth_time[v] > s {
                let p = state.parent[v].expect("vertices born after step 0 have a parent");
                index[v] = index[p];
                boxes[index[v]].push(v);
            }
        }
        boxes
    };
    Ok(BoxCover {
        ell,
        mode: MetricMode::SubgraphDistance,
        boxes,
        method: CoverMethod::Constructive,
        optimal: false,
    })
}

/// One vertex per seed present at step `n - k - ceil(d0/2)`: the end of the
/// chain of lowest-index children reaching down to step `n`.
pub fn shm_witness_set(state: &ShmState, k: u32) -> Result<WitnessSet> {
    require_p_one(state)?;
    let h = state.initial_diameter.div_ceil(2);
    if state.step < k + h {
        return Err(Error::Precondition(format!(
            "witness construction needs n >= k + ceil(d0/2), got n={} k={k} d0={}",
            state.step, state.initial_diameter
        )));
    }
    let s = state.step - k - h;
    let children = state.children();
    let mut witnesses = Vec::new();
    for seed in 0..state.graph.num_vertices() {
        if state.birth_time[seed] > s {
            continue;
        }
        let mut cur = seed;
        for t in s + 1..=state.step {
            cur = *children[cur]
                .iter()
                .find(|&&c| state.birth_time[c] == t)
                .expect("with p = 1 every vertex gains children each step");
        }
        witnesses.push(cur);
    }
    verify_witness_set(&state.graph, &witnesses, shm_ell(state.initial_diameter, k))
}

/// Named initial graphs: `triangle`, `edge`, `path<N>`, `star<N>`.
pub fn shm_initial(name: &str) -> Result<Graph> {
    let bad = || Error::InvalidInput(format!("unknown initial graph '{name}'"));
    match name {
        "triangle" => Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]),
        "edge" => Graph::from_edges(2, &[(0, 1)]),
        _ => {
            if let Some(n) = name.strip_prefix("star") {
                let n: usize = n.parse().map_err(|_| bad())?;
                if n < 2 {
                    return Err(bad());
                }
                let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
                Graph::from_edges(n, &edges)
            } else if let Some(n) = name.strip_prefix("path") {
                let n: usize = n.parse().map_err(|_| bad())?;
                if n < 2 {
                    return Err(bad());
                }
                let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
                Graph::from_edges(n, &edges)
            } else {
                Err(bad())
            }
        }
    }
}
