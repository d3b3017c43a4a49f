use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Bipartition class of a base-graph letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetterType {
    One,
    Two,
}

impl LetterType {
    pub fn other(self) -> LetterType {
        match self {
            LetterType::One => LetterType::Two,
            LetterType::Two => LetterType::One,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            LetterType::One => 1,
            LetterType::Two => 2,
        }
    }
}

/// Connected bipartite base graph on the alphabet `0..N`.
///
/// Loops are allowed and recorded, but never produce edges in the
/// hierarchical graphs: the edge rule always pairs letters of opposite type.
/// On construction the classes are relabelled if needed so that
/// `|V_1| <= |V_2|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraph {
    types: Vec<LetterType>,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    diameter: u32,
    name: Option<String>,
}

impl BaseGraph {
    pub fn new(num_letters: usize, types: &[u8], edges: &[(usize, usize)]) -> Result<BaseGraph> {
        if types.len() != num_letters {
            return Err(Error::InvalidInput(format!(
                "expected {num_letters} letter types, got {}",
                types.len()
            )));
        }
        let mut typed = Vec::with_capacity(num_letters);
        for (x, &t) in types.iter().enumerate() {
            typed.push(match t {
                1 => LetterType::One,
                2 => LetterType::Two,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "letter {x} has type {other}, expected 1 or 2"
                    )))
                }
            });
        }
        let n1 = typed.iter().filter(|&&t| t == LetterType::One).count();
        let n2 = num_letters - n1;
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidInput(
                "both bipartition classes must be non-empty".into(),
            ));
        }
        if n1 > n2 {
            for t in &mut typed {
                *t = t.other();
            }
        }

        let mut set = BTreeSet::new();
        let mut neighbors = vec![Vec::new(); num_letters];
        for &(x, y) in edges {
            if x >= num_letters || y >= num_letters {
                return Err(Error::InvalidInput(format!(
                    "edge ({x}, {y}) uses a letter outside 0..{num_letters}"
                )));
            }
            if x != y {
                if typed[x] == typed[y] {
                    return Err(Error::InvalidInput(format!(
                        "edge ({x}, {y}) joins two letters of the same type"
                    )));
                }
                neighbors[x].push(y);
                neighbors[y].push(x);
            }
            set.insert((x.min(y), x.max(y)));
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }

        let mut diameter = 0;
        for s in 0..num_letters {
            let dist = letter_distances(&neighbors, s);
            for (x, d) in dist.iter().enumerate() {
                match d {
                    Some(d) => diameter = diameter.max(*d),
                    None => return Err(Error::Disconnected(s, x)),
                }
            }
        }

        Ok(BaseGraph {
            types: typed,
            edges: set.into_iter().collect(),
            neighbors,
            diameter,
            name: None,
        })
    }

    /// V_1 = {1}, V_2 = {0, 2}, edges (1,0), (1,2).
    pub fn cherry() -> BaseGraph {
        let mut b = BaseGraph::new(3, &[2, 1, 2], &[(1, 0), (1, 2)]).expect("cherry is valid");
        b.name = Some("cherry".into());
        b
    }

    /// Six letters, V_1 = {2, 4}, V_2 = {0, 1, 3, 5}, with every loop.
    ///
    /// Letter 2 fans out to 0, 1, 3 and letter 4 to 3, 5. This is one of
    /// several plausible fan encodings, so checks on it use formulas in
    /// `n_1`, `N` and `diam(G)` rather than fixed counts.
    pub fn fan() -> BaseGraph {
        let mut edges = vec![(2, 0), (2, 1), (2, 3), (4, 3), (4, 5)];
        edges.extend((0..6).map(|x| (x, x)));
        let mut b = BaseGraph::new(6, &[2, 2, 1, 2, 1, 2], &edges).expect("fan is valid");
        b.name = Some("fan".into());
        b
    }

    pub fn builtin(name: &str) -> Option<BaseGraph> {
        match name {
            "cherry" => Some(BaseGraph::cherry()),
            "fan" => Some(BaseGraph::fan()),
            _ => None,
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn num_letters(&self) -> usize {
        self.types.len()
    }

    pub fn letter_type(&self, x: usize) -> LetterType {
        self.types[x]
    }

    /// Sizes `(n_1, n_2)` of the two classes, with `n_1 <= n_2`.
    pub fn class_sizes(&self) -> (usize, usize) {
        let n1 = self.types.iter().filter(|&&t| t == LetterType::One).count();
        (n1, self.types.len() - n1)
    }

    /// All stored edges, loops included, as `(x, y)` with `x <= y`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Non-loop neighbours of `x`, ascending.
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }

    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.edges.binary_search(&(x.min(y), x.max(y))).is_ok()
    }

    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    /// Distances in the base graph from letter `x`.
    pub fn distances_from(&self, x: usize) -> Vec<u32> {
        letter_distances(&self.neighbors, x)
            .into_iter()
            .map(|d| d.expect("base graph is connected"))
            .collect()
    }

    /// A shortest letter path from `x` to `y`, inclusive of both ends.
    pub fn shortest_path(&self, x: usize, y: usize) -> Vec<usize> {
        // BFS from y so that following parents from x walks towards y
        let n = self.num_letters();
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        parent[y] = y;
        queue.push_back(y);
        while let Some(u) = queue.pop_front() {
            for &w in &self.neighbors[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![x];
        let mut cur = x;
        while cur != y {
            cur = parent[cur];
            path.push(cur);
        }
        path
    }

    /// The self-map choosing each letter's lowest-indexed neighbour.
    pub fn self_map(&self) -> Result<Vec<usize>> {
        (0..self.num_letters())
            .map(|x| {
                self.neighbors[x].first().copied().ok_or_else(|| {
                    Error::InvalidInput(format!("letter {x} has no neighbour in the base graph"))
                })
            })
            .collect()
    }

    /// Lowest letter of the given type.
    pub fn first_of_type(&self, t: LetterType) -> usize {
        self.types
            .iter()
            .position(|&u| u == t)
            .expect("both classes are non-empty")
    }

    /// Serializes in the base-graph text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "letters={}", self.num_letters());
        for (x, t) in self.types.iter().enumerate() {
            let _ = writeln!(out, "type {x} {}", t.as_u8());
        }
        for (x, y) in &self.edges {
            let _ = writeln!(out, "edge {x} {y}");
        }
        out
    }

    /// Parses `letters=<N>`, `type <x> <1|2>` and `edge <x> <y>` lines.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<BaseGraph> {
        let mut letters: Option<usize> = None;
        let mut types: Vec<Option<u8>> = Vec::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(n) = line.strip_prefix("letters=") {
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad letter count '{n}'")))?;
                letters = Some(n);
                types = vec![None; n];
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<usize> {
                s.parse()
                    .map_err(|_| Error::parse(line_no, format!("bad number '{s}'")))
            };
            match fields.as_slice() {
                ["type", x, t] => {
                    let n = letters.ok_or_else(|| Error::parse(line_no, "type before letters="))?;
                    let x = num(x)?;
                    if x >= n {
                        return Err(Error::parse(line_no, format!("letter {x} outside 0..{n}")));
                    }
                    let t = num(t)?;
                    if t != 1 && t != 2 {
                        return Err(Error::parse(line_no, format!("type must be 1 or 2, got {t}")));
                    }
                    types[x] = Some(t as u8);
                }
                ["edge", x, y] => edges.push((num(x)?, num(y)?)),
                _ => return Err(Error::parse(line_no, format!("unrecognized line '{line}'"))),
            }
        }
        let n = letters.ok_or_else(|| Error::parse(1, "missing letters=<N>"))?;
        let types = types
            .iter()
            .enumerate()
            .map(|(x, t)| t.ok_or_else(|| Error::parse(0, format!("letter {x} has no type line"))))
            .collect::<Result<Vec<u8>>>()?;
        BaseGraph::new(n, &types, &edges)
    }
}

fn letter_distances(neighbors: &[Vec<usize>], source: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; neighbors.len()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &w in &neighbors[u] {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}
