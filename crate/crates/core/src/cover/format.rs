//! Text form of a cover:
//!
//! ```text
//! # ell=<ℓ> mode=<global|subgraph> method=<exact|greedy|constructive> optimal=<bool>
//! box 0: 0 1 2
//! box 1: 3 4
//! ```

use std::fmt::Write as _;

use super::{BoxCover, CoverMethod};
use crate::error::{Error, Result};
use crate::graph::MetricMode;

pub fn write_cover(cover: &BoxCover) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# ell={} mode={} method={} optimal={}",
        cover.ell, cover.mode, cover.method, cover.optimal
    );
    for (i, b) in cover.boxes.iter().enumerate() {
        let _ = write!(out, "box {i}:");
        for v in b {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_cover(text: &str) -> Result<BoxCover> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty cover file"))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(1, "cover must start with a '#' header"))?;

    let (mut ell, mut mode, mut method, mut optimal) = (None, None, None, None);
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("bad header field '{field}'")))?;
        match key {
            "ell" => {
                ell = Some(
                    value
                        .parse::<u32>()
                        .map_err(|_| Error::parse(1, format!("bad ell '{value}'")))?,
                )
            }
            "mode" => mode = Some(value.parse::<MetricMode>().map_err(|e| Error::parse(1, e.to_string()))?),
            "method" => {
                method = Some(match value {
                    "exact" => CoverMethod::Exact,
                    "greedy" => CoverMethod::Greedy,
                    "constructive" => CoverMethod::Constructive,
                    other => return Err(Error::parse(1, format!("unknown method '{other}'"))),
                })
            }
            "optimal" => {
                optimal = Some(
                    value
                        .parse::<bool>()
                        .map_err(|_| Error::parse(1, format!("bad optimal flag '{value}'")))?,
                )
            }
            other => return Err(Error::parse(1, format!("unknown header field '{other}'"))),
        }
    }
    let missing = |name: &str| Error::parse(1, format!("header is missing '{name}'"));
    let ell = ell.ok_or_else(|| missing("ell"))?;
    let mode = mode.ok_or_else(|| missing("mode"))?;
    let method = method.ok_or_else(|| missing("method"))?;
    let optimal = optimal.ok_or_else(|| missing("optimal"))?;

    let mut boxes = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let rest = line
            .strip_prefix("box ")
            .ok_or_else(|| Error::parse(line_no, "expected 'box <i>: ...'"))?;
        let (index, members) = rest
            .split_once(':')
            .ok_or_else(|| Error::parse(line_no, "missing ':' after box index"))?;
        let index: usize = index
            .trim()
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad box index '{index}'")))?;
        if index != boxes.len() {
            return Err(Error::parse(
                line_no,
                format!("box index {index} out of sequence, expected {}", boxes.len()),
            ));
        }
        let members = members
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(line_no, format!("bad vertex '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        boxes.push(members);
    }
    Ok(BoxCover {
        ell,
        mode,
        boxes,
        method,
        optimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_text_round_trip() {
        let cover = BoxCover {
            ell: 3,
            mode: MetricMode::SubgraphDistance,
            boxes: vec![vec![0, 1, 2], vec![3]],
            method: CoverMethod::Exact,
            optimal: true,
        };
        let text = write_cover(&cover);
        assert_eq!(
            text,
            "# ell=3 mode=subgraph method=exact optimal=true\nbox 0: 0 1 2\nbox 1: 3\n"
        );
        assert_eq!(parse_cover(&text).unwrap(), cover);
    }

    #[test]
    fn rejects_out_of_sequence_boxes() {
        let text = "# ell=3 mode=global method=greedy optimal=false\nbox 1: 0\n";
        assert!(matches!(parse_cover(text), Err(Error::Parse { line: 2, .. })));
    }
}
