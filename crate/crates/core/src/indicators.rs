//! Maximum spread in objective space (MS) and maximum architectural spread
//! (MAS) over a distance matrix.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::distance::{distance_matrix, DistanceWeights};
use crate::encoding::EncodingTable;
use crate::error::{Error, Result};
use crate::model::{validate_solution_set, DistanceMatrix, SolutionSet};

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorResult {
    pub set_label: String,
    pub n: usize,
    /// Number of objectives.
    pub o: usize,
    pub ms: f64,
    pub mas: f64,
    /// Normalization scale used for `mas`.
    pub max_d: f64,
    /// Longest sequence in this set.
    pub l_pad: usize,
    pub diagnostics: Vec<String>,
}

/// How the summand of MAS is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MasMode {
    /// Each solution contributes its eccentricity (largest distance to any
    /// other solution).
    #[default]
    Eccentricity,
    /// Each solution contributes the largest distance over all pairs.
    AllPairs,
}

/// Which `max_d` normalizes MAS when several sets are scored together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxDScale {
    /// Largest padded length over every scored set.
    #[default]
    Shared,
    /// Each set's own padded length.
    PerSet,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndicatorOptions {
    pub scale: MaxDScale,
    pub mode: MasMode,
    /// Explicit `max_d` per set label; takes precedence over `scale`.
    pub max_d_overrides: BTreeMap<String, f64>,
    /// Min-max normalize each objective over all scored sets before MS.
    pub normalize_objectives: bool,
}

/// MAS value together with notes about how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct MasOutcome {
    pub value: f64,
    pub max_d: f64,
    pub diagnostics: Vec<String>,
}

/// Root-sum-square of the per-objective ranges.
pub fn max_spread(set: &SolutionSet) -> f64 {
    max_spread_of(set, None)
}

fn max_spread_of(set: &SolutionSet, bounds: Option<&[(f64, f64)]>) -> f64 {
    let o = set.objective_names.len();
    let mut total = 0.0;
    for i in 0..o {
        let (lo, hi) = objective_range(set, i);
        let mut range = hi - lo;
        if let Some(b) = bounds {
            let (blo, bhi) = b[i];
            range = if bhi > blo { range / (bhi - blo) } else { 0.0 };
        }
        total += range * range;
    }
    total.sqrt()
}

fn objective_range(set: &SolutionSet, i: usize) -> (f64, f64) {
    set.solutions
        .iter()
        .map(|s| s.objectives[i])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// MAS with the eccentricity reading. `max_d_override` replaces `dm.max_d`.
pub fn max_architectural_spread(dm: &DistanceMatrix, max_d_override: Option<f64>) -> Result<f64> {
    mas_with_diagnostics(dm, max_d_override, MasMode::Eccentricity).map(|m| m.value)
}

pub fn mas_with_diagnostics(dm: &DistanceMatrix, max_d_override: Option<f64>, mode: MasMode) -> Result<MasOutcome> {
    let max_d = max_d_override.unwrap_or(dm.max_d);
    if !(max_d >= 0.0) || !max_d.is_finite() {
        return Err(Error::InvalidArgument(format!("max_d must be a non-negative number, got {max_d}")));
    }
    let n = dm.n();
    let mut diagnostics = Vec::new();
    let eccentricities: Vec<f64> = (0..n)
        .map(|i| dm.row(i).iter().copied().fold(0.0, f64::max))
        .collect();
    let largest = eccentricities.iter().copied().fold(0.0, f64::max);
    if largest > max_d {
        return Err(Error::InvalidArgument(format!(
            "max_d = {max_d} is smaller than an observed distance ({largest})"
        )));
    }

    if n <= 1 {
        return Ok(MasOutcome { value: 0.0, max_d, diagnostics });
    }
    if max_d == 0.0 {
        diagnostics.push("degenerate scale: max_d is 0 (all sequences empty)".to_string());
        return Ok(MasOutcome { value: 0.0, max_d, diagnostics });
    }

    let value = match mode {
        MasMode::Eccentricity => {
            let mut ratios: Vec<f64> = eccentricities
                .iter()
                .map(|e| {
                    let r = e / max_d;
                    r * r
                })
                .collect();
            // summation order fixed by value, so any relabeling of the
            // solutions gives bit-identical results
            ratios.sort_by(f64::total_cmp);
            (ratios.iter().sum::<f64>() / n as f64).sqrt()
        }
        MasMode::AllPairs => largest / max_d,
    };
    Ok(MasOutcome {
        value: value.min(1.0),
        max_d,
        diagnostics,
    })
}

/// Scores every set. Sets are validated first; all sequences must be
/// encodable with `table`.
pub fn indicators_for(
    sets: &[SolutionSet],
    table: &EncodingTable,
    w: DistanceWeights,
    options: &IndicatorOptions,
) -> Result<Vec<IndicatorResult>> {
    for set in sets {
        let violations = validate_solution_set(set);
        if !violations.is_empty() {
            return Err(Error::InvalidSet {
                label: set.label.clone(),
                violations: violations.iter().map(ToString::to_string).collect(),
            });
        }
    }

    let matrices = sets
        .par_iter()
        .map(|s| distance_matrix(s, table, w))
        .collect::<Result<Vec<_>>>()?;
    let shared_max_d = matrices.iter().map(|m| m.max_d).fold(0.0, f64::max);
    let bounds = options.normalize_objectives.then(|| objective_bounds(sets));

    sets.iter()
        .zip(&matrices)
        .map(|(set, dm)| {
            let max_d = match options.max_d_overrides.get(&set.label) {
                Some(&v) => v,
                None => match options.scale {
                    MaxDScale::Shared => shared_max_d,
                    MaxDScale::PerSet => dm.max_d,
                },
            };
            let mas = mas_with_diagnostics(dm, Some(max_d), options.mode)?;
            Ok(IndicatorResult {
                set_label: set.label.clone(),
                n: set.len(),
                o: set.objective_names.len(),
                ms: max_spread_of(set, bounds.as_deref()),
                mas: mas.value,
                max_d: mas.max_d,
                l_pad: dm.l_pad,
                diagnostics: mas.diagnostics,
            })
        })
        .collect()
}

// Per-objective (min, max) over every set; objectives are matched by position.
fn objective_bounds(sets: &[SolutionSet]) -> Vec<(f64, f64)> {
    let o = sets.iter().map(|s| s.objective_names.len()).max().unwrap_or(0);
    let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); o];
    for set in sets {
        for i in 0..set.objective_names.len() {
            let (lo, hi) = objective_range(set, i);
            bounds[i] = (bounds[i].0.min(lo), bounds[i].1.max(hi));
        }
    }
    bounds
}

/// Association between MS and MAS across scored sets. A coefficient is
/// `None` when either column has zero variance.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadCorrelation {
    pub n: usize,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
}

pub fn spread_correlation(results: &[IndicatorResult]) -> Result<SpreadCorrelation> {
    if results.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: results.len() });
    }
    let ms: Vec<f64> = results.iter().map(|r| r.ms).collect();
    let mas: Vec<f64> = results.iter().map(|r| r.mas).collect();
    Ok(SpreadCorrelation {
        n: results.len(),
        pearson: pearson(&ms, &mas),
        spearman: pearson(&average_ranks(&ms), &average_ranks(&mas)),
    })
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}
