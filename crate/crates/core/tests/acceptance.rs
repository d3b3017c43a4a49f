//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero when
//! any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transfractal::cover::{min_boxes_exact, min_boxes_exact_with_stats, verify_cover, DEFAULT_NODE_BUDGET};
use transfractal::dim::{
    fit_tau, fit_tau_cesaro, inner_sequence_diagnostic, BoxRow, BoxTable, CesaroOffset, CountMethod, FitConfig,
};
use transfractal::hm::{build_hm, hm_construct_path, hm_ell, hm_extremal_pair, hm_prefix_boxing, hm_witness_set, BaseGraph, Code};
use transfractal::shm::{shm_box_bounds, shm_counts, shm_ell, shm_evolve, shm_initial, shm_witness_set};
use transfractal::tree::{
    build_spherical, greedy_count, level_sizes, ln_big, sample_gw_levels, total_size_bound, tree_box_bounds,
    window_oscillation, DegreeProfile, LevelProfile, OffspringDistribution, RunLength,
};
use transfractal::MetricMode;

type Outcome = Result<String, String>;

/// `(id, name, check, time limit in seconds)`.
type Criterion = (u32, &'static str, fn() -> Outcome, u64);

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($arg)*));
        }
    };
}

fn big(x: u128) -> BigUint {
    BigUint::from(x)
}

fn c1_hm_diameter() -> Outcome {
    let mut checked = 0;
    for (base, max_n) in [(BaseGraph::cherry(), 5), (BaseGraph::fan(), 3)] {
        for n in 1..=max_n {
            let g = build_hm(&base, n).map_err(|e| e.to_string())?;
            let measured = common::bfs_diameter(&g);
            let formula = 2 * (n as u32 - 1) + base.diameter();
            ensure!(measured == formula, "{:?} n={n}: BFS {measured} vs formula {formula}", base.name());
            checked += 1;
        }
    }
    Ok(format!("{checked} graphs match 2(n-1)+diam(G)"))
}

fn c2_cherry_counts() -> Outcome {
    let g = build_hm(&BaseGraph::cherry(), 3).map_err(|e| e.to_string())?;
    let mut got = Vec::new();
    for (ell, want) in [(3, 9), (5, 3), (7, 1)] {
        for mode in [MetricMode::SubgraphDistance, MetricMode::GlobalDistance] {
            let c = min_boxes_exact(&g, ell, mode, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
            verify_cover(&g, &c).map_err(|e| e.to_string())?;
            ensure!(c.optimal, "ell={ell} {mode:?}: search not completed");
            ensure!(c.num_boxes() == want, "ell={ell} {mode:?}: {} boxes, want {want}", c.num_boxes());
        }
        got.push(format!("N_B({ell})={want}"));
    }
    Ok(format!(
        "{}; note: ell=7 gives 1 box, not 3, since diam(HM_3)=6 fits in a single 7-box",
        got.join(", ")
    ))
}

fn c3_hm_sandwich() -> Outcome {
    let base = BaseGraph::cherry();
    let mut table = BoxTable::new();
    for n in 1..=6usize {
        let g = build_hm(&base, n).map_err(|e| e.to_string())?;
        for k in 1..n {
            let want = 3usize.pow((n - k) as u32);
            let cover = hm_prefix_boxing(&base, n, k).map_err(|e| e.to_string())?;
            verify_cover(&g, &cover).map_err(|e| e.to_string())?;
            let w = hm_witness_set(&base, &g, n, k).map_err(|e| e.to_string())?;
            ensure!(
                cover.num_boxes() == want && w.lower_bound() == want,
                "n={n} k={k}: prefix {} witnesses {} want {want}",
                cover.num_boxes(),
                w.lower_bound()
            );
            let ell = hm_ell(&base, k).map_err(|e| e.to_string())?;
            table
                .push(BoxRow::new(ell, n as u32, want as u64, CountMethod::Exact, g.num_vertices() as u64))
                .map_err(|e| e.to_string())?;
        }
    }
    let fit = fit_tau(&table, &FitConfig::default()).map_err(|e| e.to_string())?;
    let target = 3f64.ln() / 2.0;
    ensure!((fit.slope - target).abs() <= 0.02, "slope {:.4} vs {target:.4}", fit.slope);
    Ok(format!("witness = prefix count for all n<=6; slope {:.4} vs {target:.4}", fit.slope))
}

fn c4_shm_counts() -> Outcome {
    let tri = shm_initial("triangle").map_err(|e| e.to_string())?;
    let mut checked = 0;
    for m in [2usize, 3] {
        for p in [0.0, 0.5, 1.0] {
            let states = shm_evolve(&tri, m, p, 4, 7 + m as u64).map_err(|e| e.to_string())?;
            for s in &states {
                let (v, e) = shm_counts(3, 3, m as u128, s.step).map_err(|e| e.to_string())?;
                let closed = 3 * (2 * m as u128 + 1).pow(s.step);
                ensure!(
                    s.graph.num_vertices() as u128 == v && s.graph.num_edges() as u128 == e && v == closed,
                    "m={m} p={p} n={}: V={} E={} counts ({v},{e}) closed {closed}",
                    s.step,
                    s.graph.num_vertices(),
                    s.graph.num_edges()
                );
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} snapshots match"))
}

fn c5_shm_bracket() -> Outcome {
    let (m, d0) = (2u128, 1u32);
    let tri = shm_initial("triangle").map_err(|e| e.to_string())?;
    let states = shm_evolve(&tri, 2, 1.0, 4, 1).map_err(|e| e.to_string())?;
    for k in 0..=3 {
        let w = shm_witness_set(&states[4], k).map_err(|e| e.to_string())?;
        let (lo, _) = shm_box_bounds(3, 3, m, d0, 4, k).map_err(|e| e.to_string())?;
        ensure!(w.lower_bound() as u128 == lo, "witnesses {} vs lower {lo}", w.lower_bound());
    }
    let mut brackets = Vec::new();
    for n in 4..=7u32 {
        let mut table = BoxTable::new();
        let (size, _) = shm_counts(3, 3, m, n).map_err(|e| e.to_string())?;
        for k in 0..=3 {
            let (lo, hi) = shm_box_bounds(3, 3, m, d0, n, k).map_err(|e| e.to_string())?;
            let ell = shm_ell(d0, k);
            table.push(BoxRow::new(ell, n, lo, CountMethod::LowerBound, size)).map_err(|e| e.to_string())?;
            table.push(BoxRow::new(ell, n, hi, CountMethod::UpperBound, size)).map_err(|e| e.to_string())?;
        }
        let fit = fit_tau(&table, &FitConfig::default()).map_err(|e| e.to_string())?;
        brackets.push(fit.bracket.ok_or("no bracket")?);
    }
    let (lo, hi) = *brackets.last().unwrap();
    let target = 5f64.ln();
    let detail = format!("bracket at n=7 [{lo:.4}, {hi:.4}], width {:.4}, target log 5 = {target:.4}", hi - lo);
    ensure!(hi - lo < 0.1, "{detail}: width too large");
    ensure!(lo <= target && target <= hi, "{detail}: target outside bracket");
    Ok(detail)
}

fn two_three_closed_form(n: u32) -> (u128, u128) {
    if n % 2 == 1 {
        let h = 6u128.pow((n - 1) / 2);
        (2 * h, 3 * (6 * h - 1) / 5)
    } else {
        let h = 6u128.pow(n / 2);
        (h, (8 * h - 3) / 5)
    }
}

fn tree_bound_table(profile: &DegreeProfile, ks: std::ops::RangeInclusive<u32>, extra: u32) -> Result<BoxTable, String> {
    let mut table = BoxTable::new();
    for k in ks {
        let n = k + extra;
        let levels = level_sizes(profile, n as u64).map_err(|e| e.to_string())?;
        let (lo, hi) = tree_box_bounds(&levels, n, k).map_err(|e| e.to_string())?;
        let size = levels.total();
        table
            .push(BoxRow::new(2 * k + 1, n, lo, CountMethod::LowerBound, size.clone()))
            .map_err(|e| e.to_string())?;
        table.push(BoxRow::new(2 * k + 1, n, hi, CountMethod::UpperBound, size)).map_err(|e| e.to_string())?;
    }
    Ok(table)
}

fn c6_tree_closed_forms() -> Outcome {
    let levels = level_sizes(&DegreeProfile::TwoThree, 20).map_err(|e| e.to_string())?;
    for n in 0..=20u32 {
        let (l, t) = two_three_closed_form(n);
        ensure!(
            levels.level(n as usize) == &big(l) && levels.partial_sum(n as usize) == big(t),
            "2-3 tree n={n}: L={} T={} vs ({l},{t})",
            levels.level(n as usize),
            levels.partial_sum(n as usize)
        );
    }
    for d in [2u128, 3] {
        for n in 1..=10u32 {
            let levels = level_sizes(&DegreeProfile::Constant(d as u64), n as u64).map_err(|e| e.to_string())?;
            for k in 1..=n {
                let (lo, hi) = tree_box_bounds(&levels, n, k).map_err(|e| e.to_string())?;
                let j = n - k;
                let crude = levels.partial_sum(j as usize);
                ensure!(lo == big(d.pow(j)), "d={d} n={n} k={k}: lower {lo}");
                ensure!(crude == big((d.pow(j + 1) - 1) / (d - 1)), "d={d} n={n} k={k}: sum {crude}");
                ensure!(hi <= crude, "d={d} n={n} k={k}: upper {hi} above {crude}");
            }
        }
    }
    let mut slopes = Vec::new();
    for (profile, target) in [
        (DegreeProfile::Constant(2), 2f64.ln() / 2.0),
        (DegreeProfile::TwoThree, 6f64.ln() / 4.0),
    ] {
        let table = tree_bound_table(&profile, 1..=5, 8)?;
        let fit = fit_tau(&table, &FitConfig::default()).map_err(|e| e.to_string())?;
        ensure!((fit.slope - target).abs() <= 0.03, "{profile:?}: slope {:.4} vs {target:.4}", fit.slope);
        slopes.push(format!("{:.4} vs {target:.4}", fit.slope));
    }
    Ok(format!("closed forms exact; slopes {}", slopes.join(", ")))
}

fn c7_tree_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..10 {
        let vals: Vec<u64> = (0..12).map(|_| rng.gen_range(1..=3)).collect();
        let profile = DegreeProfile::Finite(vals.clone());
        for n in 1..=12u32 {
            let levels = level_sizes(&profile, n as u64).map_err(|e| e.to_string())?;
            if levels.total() > big(60) {
                break;
            }
            let (tree, _) = build_spherical(&profile, n).map_err(|e| e.to_string())?;
            for k in 1..=2u32.min(n) {
                let (cover, _) = min_boxes_exact_with_stats(&tree.graph, 2 * k + 1, MetricMode::SubgraphDistance, DEFAULT_NODE_BUDGET)
                    .map_err(|e| e.to_string())?;
                ensure!(cover.optimal, "profile {vals:?} n={n} k={k}: search not completed");
                let exact = big(cover.num_boxes() as u128);
                let lower = levels.level((n - k) as usize).clone();
                let g = greedy_count(&levels, n, k).map_err(|e| e.to_string())?;
                let crude = levels.partial_sum((n - k) as usize);
                ensure!(
                    lower <= exact && exact <= g && g <= crude,
                    "profile {vals:?} n={n} k={k}: {lower} <= {exact} <= {g} <= {crude} fails"
                );
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (tree, k) cases satisfy the sandwich"))
}

fn c8_size_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut profiles = 0;
    let mut checked = 0;
    while profiles < 20 {
        let vals: Vec<u64> = (0..16).map(|_| if rng.gen_bool(0.5) { 1 } else { rng.gen_range(2..=3) }).collect();
        let profile = DegreeProfile::Finite(vals.clone());
        let k = match profile.lmcs(1) {
            RunLength::Finite(k) if k <= 3 => k as u128,
            _ => continue,
        };
        profiles += 1;
        for n in 0..=15u32 {
            // independent level sizes
            let mut level = 1u128;
            let mut total = 1u128;
            for &f in &vals[..n as usize] {
                level *= f as u128;
                total += level;
            }
            ensure!(total <= 2 * (k + 1) * level, "profile {vals:?} n={n}: {total} > 2({k}+1){level}");
            let rec = total_size_bound(&profile, n as u64).map_err(|e| e.to_string())?;
            ensure!(rec.total == big(total) && rec.holds, "profile {vals:?} n={n}: library record disagrees");
            checked += 1;
        }
    }
    Ok(format!("{checked} (profile, n) cases hold"))
}

fn c9_cesaro() -> Outcome {
    let (fa, fb) = (2u64, 3u64);
    let profile = DegreeProfile::Blocks { fa, fb };
    // block rule from its definition
    for h in 1..200u64 {
        let m = (1..).find(|&m: &u64| m * m >= h).unwrap() - 1;
        let want = if h > m * (m + 1) { fa } else { fb };
        ensure!(profile.value(h) == Some(want), "profile value at {h}");
    }
    let (k, terms) = (20u32, 10_000u32);
    let ell = 2 * k + 1;
    let height = terms + k;
    let levels: LevelProfile = level_sizes(&profile, height as u64).map_err(|e| e.to_string())?;
    let mut table = BoxTable::new();
    let mut total = BigUint::from(0u32);
    let mut totals = Vec::with_capacity(height as usize + 1);
    for l in &levels.levels {
        total += l;
        totals.push(total.clone());
    }
    for i in 1..=terms {
        let n = i + k;
        table
            .push(BoxRow::new(ell, n, levels.level(i as usize).clone(), CountMethod::LowerBound, totals[n as usize].clone()))
            .map_err(|e| e.to_string())?;
    }
    let diag = inner_sequence_diagnostic(&table, ell, CountMethod::LowerBound, 1000, 0.1).map_err(|e| e.to_string())?;
    let (wlo, whi) = window_oscillation(&profile, k as u64, 1000..height as u64).map_err(|e| e.to_string())?;
    ensure!(
        !diag.converged && whi - wlo >= 0.1 && diag.crossings >= 10,
        "no oscillation: inner spread {:.4}, {} crossings, window spread {:.4}",
        diag.spread,
        diag.crossings,
        whi - wlo
    );
    let fit = fit_tau_cesaro(&table, &[ell], terms, CesaroOffset::TreeRadius, CountMethod::LowerBound)
        .map_err(|e| e.to_string())?;
    let target = 6f64.ln() / 4.0;
    // independent Cesaro mean
    let direct: f64 = (1..=terms)
        .map(|i| (ln_big(levels.level(i as usize)) - ln_big(&totals[(i + k) as usize])) / -(ell as f64))
        .sum::<f64>()
        / terms as f64;
    ensure!((fit.slope - direct).abs() < 1e-9, "library mean {:.6} vs direct {direct:.6}", fit.slope);
    ensure!((fit.slope - target).abs() <= 0.02, "Cesaro value {:.4} vs {target:.4}", fit.slope);
    Ok(format!(
        "inner spread {:.3} with {} crossings, window spread {:.3}; Cesaro {:.4} vs {target:.4}",
        diag.spread,
        diag.crossings,
        whi - wlo,
        fit.slope
    ))
}

fn c10_gw() -> Outcome {
    let q = OffspringDistribution::new(vec![0.0, 0.5, 0.5]).map_err(|e| e.to_string())?;
    let mu = q.mean();
    let seeds = 200u64;
    let height = 5 + 14;
    let mut mids = Vec::new();
    let mut w = Vec::new();
    for seed in 0..seeds {
        let full = sample_gw_levels(&q, height, seed, 1 << 40).map_err(|e| e.to_string())?;
        let mut table = BoxTable::new();
        for k in 2..=5u32 {
            let n = k + 14;
            let levels = LevelProfile {
                levels: full.levels[..=n as usize].to_vec(),
            };
            let (lo, hi) = tree_box_bounds(&levels, n, k).map_err(|e| e.to_string())?;
            let size = levels.total();
            table.push(BoxRow::new(2 * k + 1, n, lo, CountMethod::LowerBound, size.clone())).map_err(|e| e.to_string())?;
            table.push(BoxRow::new(2 * k + 1, n, hi, CountMethod::UpperBound, size)).map_err(|e| e.to_string())?;
        }
        let fit = fit_tau(&table, &FitConfig::default()).map_err(|e| e.to_string())?;
        ensure!(fit.bracket.is_some(), "seed {seed}: no bracket");
        mids.push(fit.slope);
        let z: f64 = ln_big(full.level(height as usize)).exp();
        w.push(z / mu.powi(height as i32));
    }
    let stats = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0);
        (m, var.sqrt())
    };
    let (mean, sd) = stats(&mids);
    let (wm, wsd) = stats(&w);
    let se = wsd / (w.len() as f64).sqrt();
    let target = 1.5f64.ln() / 2.0;
    let detail = format!("mean {mean:.4} vs {target:.4}, sd {sd:.4}; mean W_n {wm:.4} (s.e. {se:.4})");
    ensure!((mean - target).abs() <= 0.03, "{detail}: mean off");
    ensure!(sd < 0.05, "{detail}: spread too large");
    ensure!((wm - 1.0).abs() <= 3.0 * se, "{detail}: W_n mean off");
    Ok(detail)
}

fn c11_paths() -> Outcome {
    let base = BaseGraph::cherry();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for n in 1..=3usize {
        let g = build_hm(&base, n).map_err(|e| e.to_string())?;
        let adj = common::adjacency(&g);
        for _ in 0..200 {
            let a = rng.gen_range(0..g.num_vertices());
            let b = (a + rng.gen_range(1..g.num_vertices())) % g.num_vertices();
            let (x, y) = (Code::from_index(a, 3, n), Code::from_index(b, 3, n));
            let p = hm_construct_path(&base, &x, &y).map_err(|e| e.to_string())?;
            ensure!(p.words.first() == Some(&x) && p.words.last() == Some(&y), "endpoints {x:?} {y:?}");
            for s in p.words.windows(2) {
                ensure!(g.has_edge(s[0].to_index(3), s[1].to_index(3)), "non-edge {:?} {:?}", s[0], s[1]);
            }
            let d = common::bfs(&adj, a, None)[b].ok_or("disconnected")? as usize;
            ensure!(d <= p.len() && p.len() <= p.bound(&base), "{x:?}->{y:?}: bfs {d} len {} bound {}", p.len(), p.bound(&base));
            checked += 1;
        }
    }
    let (x, y) = hm_extremal_pair(&base, 3).map_err(|e| e.to_string())?;
    let p = hm_construct_path(&base, &x, &y).map_err(|e| e.to_string())?;
    let g = build_hm(&base, 3).map_err(|e| e.to_string())?;
    let d = common::bfs(&common::adjacency(&g), x.to_index(3), None)[y.to_index(3)].unwrap() as usize;
    ensure!(p.len() == p.bound(&base) && p.len() == d, "extremal: len {} bound {} bfs {d}", p.len(), p.bound(&base));
    Ok(format!("{checked} random paths valid; extremal pair length {d} = bound"))
}

fn c12_solver_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=9);
        let p = rng.gen_range(0.0..0.5);
        let g = common::random_connected_graph(&mut rng, n, p);
        for mode in [MetricMode::GlobalDistance, MetricMode::SubgraphDistance] {
            for ell in 2..=4 {
                let c = min_boxes_exact(&g, ell, mode, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
                let oracle = common::brute_force_min_boxes(&g, ell, mode);
                ensure!(c.optimal && c.num_boxes() == oracle, "n={n} ell={ell} {mode:?}: {} vs {oracle}", c.num_boxes());
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} cases agree with exhaustive enumeration"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "HM diameter formula", c1_hm_diameter, 60),
        (2, "cherry HM_3 exact counts", c2_cherry_counts, 60),
        (3, "HM sandwich and slope", c3_hm_sandwich, 120),
        (4, "SHM counts", c4_shm_counts, 60),
        (5, "SHM p=1 dimension bracket", c5_shm_bracket, 120),
        (6, "tree closed forms and slopes", c6_tree_closed_forms, 120),
        (7, "tree solver sandwich", c7_tree_solver, 300),
        (8, "tree size bound", c8_size_bound, 60),
        (9, "Cesaro dimension", c9_cesaro, 120),
        (10, "Galton-Watson concentration", c10_gw, 300),
        (11, "HM path construction", c11_paths, 60),
        (12, "solver vs exhaustive search", c12_solver_oracle, 300),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > Duration::from_secs(limit) => Err(format!("{d}; took {elapsed:.1?}, limit {limit}s")),
            o => o,
        };
        match outcome {
            Ok(d) => println!("PASS criterion {id}: {name}: {d} [{elapsed:.1?}]"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {id}: {name}: {d} [{elapsed:.1?}]");
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}
