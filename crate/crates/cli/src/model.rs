use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use transfractal::cover::WitnessSet;
use transfractal::edgelist::parse_edge_list;
use transfractal::hm::{build_hm, hm_ell, hm_witness_set, BaseGraph};
use transfractal::rng::derive_seed;
use transfractal::shm::{shm_box_bounds, shm_ell, shm_evolve, shm_initial, shm_witness_set, ShmState};
use transfractal::tree::{
    build_gw, build_spherical, level_sizes, sample_gw_levels, tree_box_bounds, tree_witness_set, DegreeProfile,
    LevelProfile, OffspringDistribution, RootedTree, DEFAULT_TREE_VERTEX_BUDGET,
};
use transfractal::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Hm,
    Shm,
    Spherical,
    Gw,
}

/// Model parameters shared by `generate` and `box`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// HM base graph: `cherry`, `fan`, or a base-graph file.
    #[arg(long, default_value = "cherry")]
    pub base: String,
    /// HM word length.
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    /// SHM initial graph: `triangle`, `edge`, `star<N>`, `path<N>`.
    #[arg(long, default_value = "triangle")]
    pub initial: String,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// SHM steps.
    #[arg(long, default_value_t = 2)]
    pub steps: u32,
    /// Degree profile: comma list `2,3,3`, `constant:<d>`, `twothree`,
    /// `blocks:<a>:<b>`, `spikes:<c>`, or `@<file>`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    /// Tree height.
    #[arg(long, default_value_t = 4)]
    pub height: u32,
    /// Offspring law as `count:prob` pairs, e.g. `0:0,1:0.5,2:0.5`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn parse_base(spec: &str) -> Result<BaseGraph> {
    if let Some(b) = BaseGraph::builtin(spec) {
        return Ok(b);
    }
    let text = fs::read_to_string(spec).with_context(|| format!("base graph '{spec}' is neither builtin nor a readable file"))?;
    Ok(BaseGraph::from_text(&text)?)
}

pub fn parse_profile(spec: &str) -> Result<DegreeProfile> {
    if let Some(path) = spec.strip_prefix('@') {
        let text = fs::read_to_string(path).with_context(|| format!("reading profile file {path}"))?;
        return Ok(DegreeProfile::from_text(&text)?);
    }
    let num = |s: &str| -> Result<u64> { s.trim().parse().with_context(|| format!("bad profile value '{s}'")) };
    let parts: Vec<&str> = spec.split(':').collect();
    Ok(match parts.as_slice() {
        ["twothree"] => DegreeProfile::TwoThree,
        ["constant", d] => DegreeProfile::Constant(num(d)?),
        ["blocks", a, b] => DegreeProfile::Blocks { fa: num(a)?, fb: num(b)? },
        ["spikes", c] => DegreeProfile::Spikes { c: num(c)? },
        [list] => DegreeProfile::new_finite(list.split(',').map(num).collect::<Result<_>>()?)?,
        _ => bail!("unrecognized profile '{spec}'"),
    })
}

pub fn parse_offspring(spec: &str) -> Result<OffspringDistribution> {
    let mut q: Vec<f64> = Vec::new();
    for pair in spec.split(',') {
        let (i, p) = pair
            .split_once(':')
            .with_context(|| format!("expected count:prob, got '{pair}'"))?;
        let i: usize = i.trim().parse().with_context(|| format!("bad offspring count '{i}'"))?;
        let p: f64 = p.trim().parse().with_context(|| format!("bad probability '{p}'"))?;
        if q.len() <= i {
            q.resize(i + 1, 0.0);
        }
        q[i] = p;
    }
    Ok(OffspringDistribution::new(q)?)
}

/// A model resolved from its arguments. Explicit graphs are built lazily so
/// bound computations stay cheap for large trees.
pub enum Model {
    Hm { base: BaseGraph, n: u32 },
    Shm { states: Vec<ShmState>, m: usize, p: f64 },
    Spherical { profile: DegreeProfile, height: u32 },
    Gw { q: OffspringDistribution, height: u32, seed: u64 },
}

impl Model {
    pub fn resolve(kind: ModelKind, args: &ModelArgs) -> Result<Model> {
        Ok(match kind {
            ModelKind::Hm => Model::Hm {
                base: parse_base(&args.base)?,
                n: args.n,
            },
            ModelKind::Shm => {
                let initial = shm_initial(&args.initial)?;
                let states = shm_evolve(&initial, args.m, args.p, args.steps, derive_seed(args.seed, "shm"))
                    .map_err(transfractal::Error::from)?;
                Model::Shm {
                    states,
                    m: args.m,
                    p: args.p,
                }
            }
            ModelKind::Spherical => Model::Spherical {
                profile: parse_profile(args.profile.as_deref().context("spherical trees need --profile")?)?,
                height: args.height,
            },
            ModelKind::Gw => Model::Gw {
                q: parse_offspring(args.q.as_deref().context("gw trees need --q")?)?,
                height: args.height,
                seed: derive_seed(args.seed, "gw"),
            },
        })
    }

    /// Sequence index of the final graph.
    pub fn index(&self) -> u32 {
        match self {
            Model::Hm { n, .. } => *n,
            Model::Shm { states, .. } => states.last().expect("step 0 snapshot").step,
            Model::Spherical { height, .. } | Model::Gw { height, .. } => *height,
        }
    }

    pub fn tree(&self) -> Result<Option<RootedTree>> {
        Ok(match self {
            Model::Spherical { profile, height } => Some(build_spherical(profile, *height)?.0),
            Model::Gw { q, height, seed } => Some(
                build_gw(q, *height, *seed, DEFAULT_TREE_VERTEX_BUDGET as u64)
                    .map_err(transfractal::Error::from)?
                    .0,
            ),
            _ => None,
        })
    }

    pub fn graph(&self) -> Result<Graph> {
        Ok(match self {
            Model::Hm { base, n } => build_hm(base, *n as usize)?,
            Model::Shm { states, .. } => states.last().expect("step 0 snapshot").graph.clone(),
            _ => self.tree()?.expect("tree model").graph,
        })
    }

    fn levels(&self) -> Result<LevelProfile> {
        Ok(match self {
            Model::Spherical { profile, height } => level_sizes(profile, *height as u64)?,
            Model::Gw { q, height, seed } => {
                sample_gw_levels(q, *height, *seed, u64::MAX / 4).map_err(transfractal::Error::from)?
            }
            _ => unreachable!("tree models only"),
        })
    }

    /// Box size used at scale `k`.
    pub fn ell(&self, k: u32) -> Result<u32> {
        Ok(match self {
            Model::Hm { base, .. } => hm_ell(base, k as usize)?,
            Model::Shm { states, .. } => shm_ell(states[0].initial_diameter, k),
            _ => 2 * k + 1,
        })
    }

    /// `(ell, lower, upper, |G_n|)` from the model's counting bounds.
    pub fn bounds(&self, k: u32) -> Result<(u32, BigUint, BigUint, BigUint)> {
        let ell = self.ell(k)?;
        match self {
            Model::Hm { base, n } => {
                let (n, k) = (*n, k);
                if k == 0 || k > n {
                    bail!("HM bounds need 1 <= k <= n, got k={k} n={n}");
                }
                let letters = BigUint::from(base.num_letters());
                let (n1, _) = base.class_sizes();
                let upper = letters.pow(n - k);
                let lower = if (n - k) as usize >= n1 {
                    letters.pow(n - k + 1 - n1 as u32)
                } else {
                    BigUint::from(1u32)
                };
                Ok((ell, lower, upper, letters.pow(n)))
            }
            Model::Shm { states, m, p } => {
                if *p != 1.0 {
                    bail!("SHM bounds hold for p = 1 only, got p = {p}");
                }
                let s0 = &states[0];
                let last = states.last().expect("snapshot");
                let (lo, hi) = shm_box_bounds(
                    s0.graph.num_vertices() as u128,
                    s0.graph.num_edges() as u128,
                    *m as u128,
                    s0.initial_diameter,
                    last.step,
                    k,
                )?;
                Ok((ell, lo.into(), hi.into(), BigUint::from(last.graph.num_vertices())))
            }
            _ => {
                let levels = self.levels()?;
                let (lo, hi) = tree_box_bounds(&levels, self.index(), k)?;
                Ok((ell, lo, hi, levels.total()))
            }
        }
    }

    pub fn witness(&self, k: u32) -> Result<WitnessSet> {
        Ok(match self {
            Model::Hm { base, n } => hm_witness_set(base, &build_hm(base, *n as usize)?, *n as usize, k as usize)?,
            Model::Shm { states, .. } => shm_witness_set(states.last().expect("snapshot"), k)?,
            _ => tree_witness_set(&self.tree()?.expect("tree model"), k)?,
        })
    }
}

/// A graph read from an edge-list file.
pub fn read_graph(path: &PathBuf) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}
