//! Box-count tables and the fractal-dimension estimators built on them.
//!
//! Each estimator takes, for every box size `ell`, the row with the largest
//! sequence index `n`, then regresses `y = ln(N_B / |G_n|)` on `x`: `-ln ell`
//! for the box dimension and `-ell` for the transfinite dimension.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::tree::ln_big;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CountMethod {
    Exact,
    LowerBound,
    UpperBound,
    Greedy,
}

impl CountMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountMethod::Exact => "exact",
            CountMethod::LowerBound => "lower",
            CountMethod::UpperBound => "upper",
            CountMethod::Greedy => "greedy",
        }
    }
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CountMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CountMethod::Exact),
            "lower" => Ok(CountMethod::LowerBound),
            "upper" => Ok(CountMethod::UpperBound),
            "greedy" => Ok(CountMethod::Greedy),
            other => Err(Error::InvalidInput(format!("unknown count method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRow {
    pub ell: u32,
    pub n: u32,
    pub count: BigUint,
    pub method: CountMethod,
    pub size: BigUint,
}

impl BoxRow {
    pub fn new(ell: u32, n: u32, count: impl Into<BigUint>, method: CountMethod, size: impl Into<BigUint>) -> BoxRow {
        BoxRow {
            ell,
            n,
            count: count.into(),
            method,
            size: size.into(),
        }
    }

    /// `ln(count / size)`.
    pub fn log_ratio(&self) -> f64 {
        ln_big(&self.count) - ln_big(&self.size)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoxTable {
    pub rows: Vec<BoxRow>,
}

impl BoxTable {
    pub fn new() -> BoxTable {
        BoxTable::default()
    }

    pub fn push(&mut self, row: BoxRow) -> Result<()> {
        if row.count.is_zero() {
            return Err(Error::InvalidInput(format!("ell={} n={}: count must be at least 1", row.ell, row.n)));
        }
        if row.size < row.count {
            return Err(Error::InvalidInput(format!(
                "ell={} n={}: size {} is below count {}",
                row.ell, row.n, row.size, row.count
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Checks `lower <= exact <= upper` wherever several methods share `(ell, n)`.
    pub fn check_consistency(&self) -> Result<()> {
        let mut by_key: HashMap<(u32, u32), Vec<&BoxRow>> = HashMap::new();
        for r in &self.rows {
            by_key.entry((r.ell, r.n)).or_default().push(r);
        }
        for ((ell, n), rows) in by_key {
            let lo = rows.iter().filter(|r| r.method == CountMethod::LowerBound).map(|r| &r.count).max();
            let ex = rows.iter().filter(|r| r.method == CountMethod::Exact).map(|r| &r.count);
            let hi = rows
                .iter()
                .filter(|r| matches!(r.method, CountMethod::UpperBound | CountMethod::Greedy))
                .map(|r| &r.count)
                .min();
            for e in ex.chain(hi) {
                if let Some(l) = lo {
                    if l > e {
                        return Err(Error::InvalidInput(format!(
                            "ell={ell} n={n}: lower bound {l} exceeds {e}"
                        )));
                    }
                }
            }
            let ex_max = rows.iter().filter(|r| r.method == CountMethod::Exact).map(|r| &r.count).max();
            if let (Some(e), Some(h)) = (ex_max, hi) {
                if e > h {
                    return Err(Error::InvalidInput(format!(
                        "ell={ell} n={n}: exact count {e} exceeds upper bound {h}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["ell", "n", "count", "method", "size"])
            .map_err(csv_error)?;
        for r in &self.rows {
            w.write_record([
                r.ell.to_string(),
                r.n.to_string(),
                r.count.to_string(),
                r.method.to_string(),
                r.size.to_string(),
            ])
            .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<BoxTable> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers().map_err(csv_error)?.clone();
        if headers.iter().collect::<Vec<_>>() != ["ell", "n", "count", "method", "size"] {
            return Err(Error::parse(1, "expected header 'ell,n,count,method,size'"));
        }
        let mut table = BoxTable::new();
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| Error::parse(line, e.to_string()))?;
            let field = |j: usize| record.get(j).unwrap_or("").trim();
            let bad = |what: &str, v: &str| Error::parse(line, format!("bad {what} '{v}'"));
            let row = BoxRow {
                ell: field(0).parse().map_err(|_| bad("ell", field(0)))?,
                n: field(1).parse().map_err(|_| bad("n", field(1)))?,
                count: field(2).parse().map_err(|_| bad("count", field(2)))?,
                method: field(3).parse().map_err(|_| bad("method", field(3)))?,
                size: field(4).parse().map_err(|_| bad("size", field(4)))?,
            };
            table.push(row).map_err(|e| Error::parse(line, e.to_string()))?;
        }
        Ok(table)
    }

    /// Rows of the given methods, reduced to one per `ell` at the largest
    /// `n`; among several rows there, the smallest count wins.
    fn frontier(&self, methods: &[CountMethod]) -> Vec<&BoxRow> {
        let mut best: BTreeMap<u32, &BoxRow> = BTreeMap::new();
        for r in self.rows.iter().filter(|r| methods.contains(&r.method)) {
            let better = match best.get(&r.ell) {
                None => true,
                Some(b) => r.n > b.n || (r.n == b.n && r.count < b.count),
            };
            if better {
                best.insert(r.ell, r);
            }
        }
        best.into_values().collect()
    }

    fn lookup(&self) -> HashMap<(u32, u32, CountMethod), &BoxRow> {
        self.rows.iter().map(|r| ((r.ell, r.n, r.method), r)).collect()
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    BoxDim,
    Transfinite,
    TransfiniteCesaro,
}

impl FitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitKind::BoxDim => "box",
            FitKind::Transfinite => "transfinite",
            FitKind::TransfiniteCesaro => "cesaro",
        }
    }
}

impl fmt::Display for FitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Estimator output.
///
/// For Cesaro fits `points` holds `(ell, value)`, `slope` is the value at the
/// largest `ell` and `max_residual` the change between the last two values.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionFit {
    pub kind: FitKind,
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub bracket: Option<(f64, f64)>,
    /// `max_residual` within the configured tolerance.
    pub linear: bool,
}

impl DimensionFit {
    pub fn bracket_contains(&self, value: f64) -> bool {
        self.bracket.is_some_and(|(lo, hi)| lo <= value && value <= hi)
    }

    pub fn bracket_width(&self) -> Option<f64> {
        self.bracket.map(|(lo, hi)| hi - lo)
    }
}

pub fn fits_to_csv(fits: &[DimensionFit]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "slope", "intercept", "max_residual", "bracket_lo", "bracket_hi"])
        .map_err(csv_error)?;
    for f in fits {
        let (lo, hi) = match f.bracket {
            Some((lo, hi)) => (lo.to_string(), hi.to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([
            f.kind.to_string(),
            f.slope.to_string(),
            f.intercept.to_string(),
            f.max_residual.to_string(),
            lo,
            hi,
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Largest residual, in natural-log units, for a fit to count as linear.
    pub residual_tolerance: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            residual_tolerance: 0.05,
        }
    }
}

/// Unweighted least squares: `(slope, intercept, max |residual|)`.
pub fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!("{} points, need at least 2", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all x values coincide".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = points
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok((slope, intercept, max_residual))
}

const MIN_POINTS: usize = 3;

fn fit_kind(table: &BoxTable, kind: FitKind, config: &FitConfig) -> Result<DimensionFit> {
    let x_of = |ell: u32| -> f64 {
        match kind {
            FitKind::BoxDim => -(ell as f64).ln(),
            _ => -(ell as f64),
        }
    };
    let points_of = |rows: Vec<&BoxRow>| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (x_of(r.ell), r.log_ratio())).collect()
    };
    let exact = points_of(table.frontier(&[CountMethod::Exact]));
    let lower = points_of(table.frontier(&[CountMethod::LowerBound]));
    let upper = points_of(table.frontier(&[CountMethod::UpperBound, CountMethod::Greedy]));

    let bracket = if lower.len() >= MIN_POINTS && upper.len() >= MIN_POINTS {
        let (a, ia, ra) = least_squares(&lower)?;
        let (b, ib, rb) = least_squares(&upper)?;
        let (lo, hi) = (a.min(b), a.max(b));
        Some(((lo, hi), lo + (hi - lo) / 2.0, (ia + ib) / 2.0, ra.max(rb)))
    } else {
        None
    };

    let (points, slope, intercept, max_residual) = if exact.len() >= MIN_POINTS {
        let (s, i, r) = least_squares(&exact)?;
        (exact, s, i, r)
    } else if let Some((_, s, i, r)) = bracket {
        let mut pts = lower;
        pts.extend(upper);
        (pts, s, i, r)
    } else if lower.len() >= MIN_POINTS || upper.len() >= MIN_POINTS {
        let pts = if lower.len() >= MIN_POINTS { lower } else { upper };
        let (s, i, r) = least_squares(&pts)?;
        (pts, s, i, r)
    } else {
        return Err(Error::InsufficientData(format!(
            "need at least {MIN_POINTS} distinct box sizes of one count method"
        )));
    };
    Ok(DimensionFit {
        kind,
        points,
        slope,
        intercept,
        max_residual,
        bracket: bracket.map(|b| b.0),
        linear: max_residual <= config.residual_tolerance,
    })
}

/// Box dimension: slope of `ln(N_B/|G_n|)` against `-ln ell`.
pub fn fit_db(table: &BoxTable, config: &FitConfig) -> Result<DimensionFit> {
    fit_kind(table, FitKind::BoxDim, config)
}

/// Transfinite dimension: slope of `ln(N_B/|G_n|)` against `-ell`. With
/// lower and upper rows for at least three sizes, both are fitted and the
/// pair of slopes is returned as the bracket.
pub fn fit_tau(table: &BoxTable, config: &FitConfig) -> Result<DimensionFit> {
    fit_kind(table, FitKind::Transfinite, config)
}

/// Which sequence index accompanies box size `ell` in the Cesaro average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CesaroOffset {
    /// Rows `(ell, i + ell)`.
    BoxSize,
    /// Rows `(ell, i + k)` with `ell = 2k + 1`, as for trees.
    TreeRadius,
}

impl CesaroOffset {
    fn offset(self, ell: u32) -> Result<u32> {
        match self {
            CesaroOffset::BoxSize => Ok(ell),
            CesaroOffset::TreeRadius if ell % 2 == 1 => Ok((ell - 1) / 2),
            CesaroOffset::TreeRadius => Err(Error::InvalidInput(format!(
                "tree-radius offset needs odd ell, got {ell}"
            ))),
        }
    }
}

/// Mean over `i = 1..=terms` of `ln(N_B^{i+o}(ell)/|G_{i+o}|) / -ell` for
/// each `ell`, using rows of one count method.
pub fn fit_tau_cesaro(
    table: &BoxTable,
    ells: &[u32],
    terms: u32,
    offset: CesaroOffset,
    method: CountMethod,
) -> Result<DimensionFit> {
    if ells.is_empty() || terms == 0 {
        return Err(Error::InsufficientData("need at least one ell and one term".into()));
    }
    let rows = table.lookup();
    let mut points = Vec::with_capacity(ells.len());
    let mut sorted = ells.to_vec();
    sorted.sort_unstable();
    for &ell in &sorted {
        let o = offset.offset(ell)?;
        let mut sum = 0.0;
        for i in 1..=terms {
            let r = rows.get(&(ell, i + o, method)).ok_or_else(|| {
                Error::InsufficientData(format!("missing {method} row ell={ell} n={}", i + o))
            })?;
            sum += r.log_ratio() / -(ell as f64);
        }
        points.push((ell as f64, sum / terms as f64));
    }
    let slope = points.last().expect("non-empty").1;
    let gap = match points.len() {
        0 | 1 => 0.0,
        n => (points[n - 1].1 - points[n - 2].1).abs(),
    };
    Ok(DimensionFit {
        kind: FitKind::TransfiniteCesaro,
        points,
        slope,
        intercept: 0.0,
        max_residual: gap,
        bracket: None,
        linear: true,
    })
}

/// The inner sequence `n -> ln(N_B^n(ell)/|G_n|) / -ell` at fixed `ell`.
pub fn inner_sequence(table: &BoxTable, ell: u32, method: CountMethod) -> Vec<(u32, f64)> {
    let mut seq: Vec<(u32, f64)> = table
        .rows
        .iter()
        .filter(|r| r.ell == ell && r.method == method)
        .map(|r| (r.n, r.log_ratio() / -(ell as f64)))
        .collect();
    seq.sort_by_key(|p| p.0);
    seq
}

/// Oscillation summary of an inner sequence over its tail.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerDiagnostic {
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    /// Times the sequence crosses the midpoint of its range.
    pub crossings: usize,
    pub converged: bool,
}

/// Spread and midpoint crossings of the inner sequence for `n >= from`; the
/// sequence counts as converged when its spread is within `tolerance`.
pub fn inner_sequence_diagnostic(
    table: &BoxTable,
    ell: u32,
    method: CountMethod,
    from: u32,
    tolerance: f64,
) -> Result<InnerDiagnostic> {
    let seq: Vec<f64> = inner_sequence(table, ell, method)
        .into_iter()
        .filter(|&(n, _)| n >= from)
        .map(|(_, v)| v)
        .collect();
    if seq.len() < 2 {
        return Err(Error::InsufficientData(format!("inner sequence at ell={ell} has under 2 terms")));
    }
    let min = seq.iter().copied().fold(f64::INFINITY, f64::min);
    let max = seq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = (min + max) / 2.0;
    let crossings = seq
        .windows(2)
        .filter(|w| (w[0] - mid).signum() != (w[1] - mid).signum())
        .count();
    Ok(InnerDiagnostic {
        min,
        max,
        spread: max - min,
        crossings,
        converged: max - min <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64, ells: &[u32]) -> BoxTable {
        let size = 1_000_000_000u64;
        let mut t = BoxTable::new();
        for &ell in ells {
            let count = (size as f64 * f(ell as f64)).round() as u64;
            t.push(BoxRow::new(ell, 1, count.max(1), CountMethod::Exact, size)).unwrap();
        }
        t
    }

    #[test]
    fn power_law_recovers_box_dimension() {
        let t = synthetic(|l| l.powi(-2), &[2, 4, 8, 16, 32]);
        let fit = fit_db(&t, &FitConfig::default()).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-6);
        assert!(fit.linear);
    }

    #[test]
    fn exponential_law_is_not_a_power_law() {
        let t = synthetic(|l| (-0.5 * l).exp(), &[2, 4, 6, 8, 10, 12]);
        let fit = fit_db(&t, &FitConfig::default()).unwrap();
        assert!(!fit.linear, "residual {}", fit.max_residual);
        let tau = fit_tau(&t, &FitConfig::default()).unwrap();
        assert!((tau.slope - 0.5).abs() < 1e-6);
        assert!(tau.linear);
    }

    #[test]
    fn largest_n_per_ell_is_used() {
        let mut t = BoxTable::new();
        for ell in [3u32, 5, 7] {
            t.push(BoxRow::new(ell, 1, 1u32, CountMethod::Exact, 2u32)).unwrap();
            t.push(BoxRow::new(ell, 9, 1u32, CountMethod::Exact, 10u32.pow(ell))).unwrap();
        }
        let fit = fit_tau(&t, &FitConfig::default()).unwrap();
        assert!((fit.slope - 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn bound_pairs_give_a_bracket() {
        let mut t = BoxTable::new();
        for k in 1..=4u32 {
            let ell = 2 * k + 1;
            t.push(BoxRow::new(ell, 10, 2u32.pow(10 - k), CountMethod::LowerBound, 2u32.pow(11))).unwrap();
            t.push(BoxRow::new(ell, 10, 3 * 2u32.pow(10 - k), CountMethod::UpperBound, 2u32.pow(11))).unwrap();
        }
        let fit = fit_tau(&t, &FitConfig::default()).unwrap();
        let (lo, hi) = fit.bracket.unwrap();
        assert!(lo <= fit.slope && fit.slope <= hi);
        assert!((fit.slope - 2f64.ln() / 2.0).abs() < 1e-9);
        assert!(fit.bracket_contains(fit.slope));
    }

    #[test]
    fn too_few_points() {
        let t = synthetic(|l| l.powi(-2), &[2, 4]);
        assert!(matches!(fit_db(&t, &FitConfig::default()), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn csv_round_trips() {
        let mut t = BoxTable::new();
        t.push(BoxRow::new(3, 4, 9u32, CountMethod::Exact, 81u32)).unwrap();
        let big = BigUint::from(3u32).pow(100);
        t.push(BoxRow::new(5, 4, 3u32, CountMethod::Greedy, big)).unwrap();
        let text = t.to_csv().unwrap();
        assert!(text.starts_with("ell,n,count,method,size\n3,4,9,exact,81\n"));
        assert_eq!(BoxTable::from_csv(&text).unwrap(), t);
        assert!(BoxTable::from_csv("ell,n,count,method,size\n3,4,0,exact,81\n").is_err());
        assert!(BoxTable::from_csv("ell,n,count,method,size\n3,4,9,exact,2\n").is_err());
        let fits = fits_to_csv(&[DimensionFit {
            kind: FitKind::Transfinite,
            points: vec![],
            slope: 0.5,
            intercept: 0.0,
            max_residual: 0.0,
            bracket: None,
            linear: true,
        }])
        .unwrap();
        assert_eq!(fits, "kind,slope,intercept,max_residual,bracket_lo,bracket_hi\ntransfinite,0.5,0,0,,\n");
    }

    #[test]
    fn consistency_check() {
        let mut t = BoxTable::new();
        t.push(BoxRow::new(3, 4, 9u32, CountMethod::Exact, 81u32)).unwrap();
        t.push(BoxRow::new(3, 4, 10u32, CountMethod::LowerBound, 81u32)).unwrap();
        assert!(t.check_consistency().is_err());
    }

    #[test]
    fn cesaro_of_constant_sequence() {
        let mut t = BoxTable::new();
        for ell in [3u32, 5] {
            for n in 0..20u32 {
                t.push(BoxRow::new(ell, n, 1u32, CountMethod::Exact, 7u32.pow(ell))).unwrap();
            }
        }
        let fit = fit_tau_cesaro(&t, &[3, 5], 10, CesaroOffset::BoxSize, CountMethod::Exact).unwrap();
        assert!((fit.slope - 7f64.ln()).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
        assert!(fit_tau_cesaro(&t, &[3], 30, CesaroOffset::BoxSize, CountMethod::Exact).is_err());
        assert!(fit_tau_cesaro(&t, &[4], 1, CesaroOffset::TreeRadius, CountMethod::Exact).is_err());
    }
}
