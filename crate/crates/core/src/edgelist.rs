//! Plain-text edge-list format.
//!
//! ```text
//! # vertices=<N>
//! # label <v> <string>
//! # birth <v> <t>
//! <u> <v>
//! ```
//!
//! The writer emits the header, then label lines, then birth lines, then
//! edges with `u < v` in lexicographic order. Parsing canonical output and
//! writing it again reproduces the same bytes.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};

/// A parsed edge-list file: the graph plus optional per-vertex birth stamps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeListFile {
    pub graph: Graph,
    pub birth: Option<Vec<u32>>,
}

pub fn write_edge_list(graph: &Graph) -> String {
    write_edge_list_with_birth(graph, None)
}

pub fn write_edge_list_with_birth(graph: &Graph, birth: Option<&[u32]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# vertices={}", graph.num_vertices());
    for (v, label) in graph.labels().iter().enumerate() {
        if let Some(l) = label {
            let _ = writeln!(out, "# label {v} {l}");
        }
    }
    if let Some(birth) = birth {
        for (v, t) in birth.iter().enumerate() {
            let _ = writeln!(out, "# birth {v} {t}");
        }
    }
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    Ok(parse_edge_list_file(text)?.graph)
}

pub fn parse_edge_list_file(text: &str) -> Result<EdgeListFile> {
    let mut builder: Option<GraphBuilder> = None;
    let mut birth: Vec<(usize, u32)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            if let Some(n) = rest.strip_prefix("vertices=") {
                if builder.is_some() {
                    return Err(Error::parse(line_no, "duplicate vertices header"));
                }
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad vertex count '{n}'")))?;
                builder = Some(GraphBuilder::new(n));
            } else if let Some(rest) = rest.strip_prefix("label ") {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| Error::parse(line_no, "label before vertices header"))?;
                let (v, label) = rest
                    .split_once(' ')
                    .ok_or_else(|| Error::parse(line_no, "label line needs '<v> <string>'"))?;
                let v: usize = v
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad vertex '{v}'")))?;
                b.set_label(v, label)
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
            } else if let Some(rest) = rest.strip_prefix("birth ") {
                let mut it = rest.split_whitespace();
                let (v, t) = match (it.next(), it.next(), it.next()) {
                    (Some(v), Some(t), None) => (v, t),
                    _ => return Err(Error::parse(line_no, "birth line needs '<v> <t>'")),
                };
                let v: usize = v
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad vertex '{v}'")))?;
                let t: u32 = t
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad birth time '{t}'")))?;
                birth.push((v, t));
            }
            // any other comment line is ignored
            continue;
        }
        let b = builder
            .as_mut()
            .ok_or_else(|| Error::parse(line_no, "edge before vertices header"))?;
        let mut it = line.split_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => return Err(Error::parse(line_no, "edge line needs exactly two vertices")),
        };
        let u: usize = u
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad vertex '{u}'")))?;
        let v: usize = v
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad vertex '{v}'")))?;
        b.add_edge(u, v)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
    }

    let builder = builder.ok_or_else(|| Error::parse(1, "missing '# vertices=<N>' header"))?;
    let n = builder.num_vertices();
    let birth = if birth.is_empty() {
        None
    } else {
        let mut stamps = vec![None; n];
        for (v, t) in birth {
            if v >= n {
                return Err(Error::parse(0, format!("birth stamp for vertex {v} outside 0..{n}")));
            }
            stamps[v] = Some(t);
        }
        let stamps: Option<Vec<u32>> = stamps.into_iter().collect();
        Some(stamps.ok_or_else(|| Error::parse(0, "birth stamps must cover every vertex"))?)
    };
    Ok(EdgeListFile {
        graph: builder.freeze(),
        birth,
    })
}
