use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{ensure, Result};
use clap::{Args, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use transfractal::dim::{
    fit_tau, fit_tau_cesaro, fits_to_csv, BoxRow, BoxTable, CesaroOffset, CountMethod, DimensionFit, FitConfig,
};
use transfractal::hm::{build_hm, hm_ell, hm_prefix_boxing, hm_witness_set, BaseGraph};
use transfractal::rng::derive_seed;
use transfractal::shm::{shm_box_bounds, shm_counts, shm_ell};
use transfractal::tree::{
    level_sizes, sample_gw_levels, tree_box_bounds, DegreeProfile, LevelProfile, OffspringDistribution,
};

use crate::{describe, meets_target, write_file, write_run_config};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Cherry HM counts at n = k+4, slope against (log 3)/2.
    Cherry,
    /// SHM p=1 triangle bracket, m=2, n=7, against log 5.
    Shm,
    /// Binary tree bounds, n = k+8, against (log 2)/2.
    BinaryTree,
    /// 2-3 tree bounds, n = k+8, against (log 6)/4.
    TwoThree,
    /// Blocks profile Cesaro average at k=20 over 10^4 terms, against (log 6)/4.
    Cesaro,
    /// Galton-Watson q=(0,1/2,1/2): mean bracket midpoint over seeds, against (log 1.5)/2.
    Gw,
}

#[derive(Args, Serialize)]
pub struct ReproArgs {
    #[arg(value_enum)]
    scenario: Scenario,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeds for the `gw` scenario.
    #[arg(long, default_value_t = 200)]
    samples: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

struct Outcome {
    table: BoxTable,
    fit: DimensionFit,
    /// Value compared with the target; the fitted slope unless averaged.
    value: f64,
    target: f64,
    tolerance: f64,
}

fn tree_table(profile: &DegreeProfile, extra: u32) -> Result<BoxTable> {
    let mut table = BoxTable::new();
    for k in 1..=5 {
        let n = k + extra;
        let levels = level_sizes(profile, n as u64)?;
        push_tree_bounds(&mut table, &levels, n, k)?;
    }
    Ok(table)
}

fn push_tree_bounds(table: &mut BoxTable, levels: &LevelProfile, n: u32, k: u32) -> Result<()> {
    let (lo, hi) = tree_box_bounds(levels, n, k)?;
    let size = levels.total();
    table.push(BoxRow::new(2 * k + 1, n, lo, CountMethod::LowerBound, size.clone()))?;
    table.push(BoxRow::new(2 * k + 1, n, hi, CountMethod::UpperBound, size))?;
    Ok(())
}

fn cherry() -> Result<Outcome> {
    let base = BaseGraph::cherry();
    let mut table = BoxTable::new();
    for k in 1..=4usize {
        let n = k + 4;
        let g = build_hm(&base, n)?;
        let cover = hm_prefix_boxing(&base, n, k)?;
        let w = hm_witness_set(&base, &g, n, k)?;
        ensure!(cover.num_boxes() == w.lower_bound(), "bounds differ at n={n} k={k}");
        table.push(BoxRow::new(hm_ell(&base, k)?, n as u32, cover.num_boxes() as u64, CountMethod::Exact, g.num_vertices() as u64))?;
    }
    let fit = fit_tau(&table, &FitConfig::default())?;
    Ok(Outcome { value: fit.slope, table, fit, target: 3f64.ln() / 2.0, tolerance: 0.02 })
}

fn shm() -> Result<Outcome> {
    let (m, n, d0) = (2u128, 7u32, 1u32);
    let (size, _) = shm_counts(3, 3, m, n)?;
    let mut table = BoxTable::new();
    for k in 0..=3 {
        let (lo, hi) = shm_box_bounds(3, 3, m, d0, n, k)?;
        table.push(BoxRow::new(shm_ell(d0, k), n, lo, CountMethod::LowerBound, size))?;
        table.push(BoxRow::new(shm_ell(d0, k), n, hi, CountMethod::UpperBound, size))?;
    }
    let fit = fit_tau(&table, &FitConfig::default())?;
    Ok(Outcome { value: fit.slope, table, fit, target: 5f64.ln(), tolerance: 0.05 })
}

fn trees(profile: DegreeProfile, target: f64) -> Result<Outcome> {
    let table = tree_table(&profile, 8)?;
    let fit = fit_tau(&table, &FitConfig::default())?;
    Ok(Outcome { value: fit.slope, table, fit, target, tolerance: 0.03 })
}

fn cesaro() -> Result<Outcome> {
    let profile = DegreeProfile::Blocks { fa: 2, fb: 3 };
    let (k, terms) = (20u32, 10_000u32);
    let levels = level_sizes(&profile, (terms + k) as u64)?;
    let mut totals = Vec::with_capacity(levels.levels.len());
    let mut acc = BigUint::from(0u32);
    for l in &levels.levels {
        acc += l;
        totals.push(acc.clone());
    }
    let mut table = BoxTable::new();
    for i in 1..=terms {
        let n = i + k;
        table.push(BoxRow::new(2 * k + 1, n, levels.level(i as usize).clone(), CountMethod::LowerBound, totals[n as usize].clone()))?;
    }
    let fit = fit_tau_cesaro(&table, &[2 * k + 1], terms, CesaroOffset::TreeRadius, CountMethod::LowerBound)?;
    Ok(Outcome { value: fit.slope, table, fit, target: 6f64.ln() / 4.0, tolerance: 0.02 })
}

fn gw(args: &ReproArgs, per_seed: &mut String) -> Result<Outcome> {
    let q = OffspringDistribution::new(vec![0.0, 0.5, 0.5])?;
    let height = 19;
    let mut first = None;
    let mut mids = Vec::new();
    per_seed.push_str("seed,slope,bracket_lo,bracket_hi\n");
    for s in 0..args.samples {
        let seed = derive_seed(args.seed, &format!("gw/{s}"));
        let full = sample_gw_levels(&q, height, seed, u64::MAX / 4).map_err(transfractal::Error::from)?;
        let mut table = BoxTable::new();
        for k in 2..=5 {
            let n = k + 14;
            let levels = LevelProfile { levels: full.levels[..=n as usize].to_vec() };
            push_tree_bounds(&mut table, &levels, n, k)?;
        }
        let fit = fit_tau(&table, &FitConfig::default())?;
        let (lo, hi) = fit.bracket.unwrap_or((fit.slope, fit.slope));
        let _ = writeln!(per_seed, "{s},{},{lo},{hi}", fit.slope);
        mids.push(fit.slope);
        first.get_or_insert((table, fit));
    }
    let (table, fit) = first.ok_or_else(|| anyhow::anyhow!("--samples must be positive"))?;
    let mean = mids.iter().sum::<f64>() / mids.len() as f64;
    Ok(Outcome { table, fit, value: mean, target: 1.5f64.ln() / 2.0, tolerance: 0.03 })
}

pub fn run(args: &ReproArgs) -> Result<ExitCode> {
    let mut per_seed = String::new();
    let outcome = match args.scenario {
        Scenario::Cherry => cherry()?,
        Scenario::Shm => shm()?,
        Scenario::BinaryTree => trees(DegreeProfile::Constant(2), 2f64.ln() / 2.0)?,
        Scenario::TwoThree => trees(DegreeProfile::TwoThree, 6f64.ln() / 4.0)?,
        Scenario::Cesaro => cesaro()?,
        Scenario::Gw => gw(args, &mut per_seed)?,
    };
    write_file(&args.out.join("boxes.csv"), &outcome.table.to_csv()?)?;
    write_file(&args.out.join("fits.csv"), &fits_to_csv(std::slice::from_ref(&outcome.fit))?)?;
    if !per_seed.is_empty() {
        write_file(&args.out.join("seeds.csv"), &per_seed)?;
    }
    write_run_config(&args.out, "repro", args)?;
    println!("{}", describe(&outcome.fit));
    let ok = if matches!(args.scenario, Scenario::Gw) {
        (outcome.value - outcome.target).abs() <= outcome.tolerance
    } else {
        meets_target(&outcome.fit, outcome.target, outcome.tolerance)
    };
    println!(
        "value {:.6} target {:.6} tolerance {}: {}",
        outcome.value,
        outcome.target,
        outcome.tolerance,
        if ok { "ok" } else { "FAILED" }
    );
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
