//! Pairwise front comparison: coverage matrix, per-column domination share
//! and normalized hypervolume per front.

use crate::error::{Error, Result};
use crate::pareto::{normalized_hypervolume, relative_coverage, weakly_dominates, ParetoFront};

#[derive(Debug, Clone, PartialEq)]
pub struct FrontComparison {
    pub names: Vec<String>,
    /// `coverage[a][b]` is `relative_coverage(front a, front b)`; `None` on
    /// the diagonal.
    pub coverage: Vec<Vec<Option<(usize, usize)>>>,
    /// Per column `b`: `(covered, |B|)` where `covered` counts the distinct
    /// points of `b` weakly dominated by at least one other front.
    pub dominated: Vec<(usize, usize)>,
    pub hypervolume: Vec<f64>,
}

impl FrontComparison {
    /// Share of column `b` dominated by the other fronts, in percent.
    pub fn dominated_percent(&self, b: usize) -> f64 {
        let (covered, total) = self.dominated[b];
        100.0 * covered as f64 / total as f64
    }
}

/// Compares every ordered pair of fronts.
pub fn compare_fronts(fronts: &[(String, ParetoFront)]) -> Result<FrontComparison> {
    if fronts.is_empty() {
        return Err(Error::EmptyFront);
    }
    if fronts.len() < 2 {
        return Err(Error::invalid(
            "fronts",
            "need at least two fronts to compare",
        ));
    }
    let deduped: Vec<ParetoFront> = fronts.iter().map(|(_, f)| f.dedup()).collect();
    if deduped.iter().any(ParetoFront::is_empty) {
        return Err(Error::EmptyFront);
    }

    let n = fronts.len();
    let mut coverage = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                coverage[a][b] = Some(relative_coverage(&deduped[a], &deduped[b])?);
            }
        }
    }

    let dominated = (0..n)
        .map(|b| {
            let covered = deduped[b]
                .points()
                .iter()
                .filter(|p| {
                    (0..n)
                        .filter(|&a| a != b)
                        .any(|a| deduped[a].points().iter().any(|q| weakly_dominates(q, p)))
                })
                .count();
            (covered, deduped[b].len())
        })
        .collect();

    let hypervolume = deduped
        .iter()
        .map(normalized_hypervolume)
        .collect::<Result<Vec<_>>>()?;

    Ok(FrontComparison {
        names: fronts.iter().map(|(name, _)| name.clone()).collect(),
        coverage,
        dominated,
        hypervolume,
    })
}
