//! Dominance, non-dominated sorting, crowding and front-quality metrics.
//!
//! All objectives are minimized. `a` weakly dominates `b` when it is no worse
//! in every objective, and strictly dominates when it is also better in at
//! least one.

use crate::error::{Error, Result};
use crate::evolution::Individual;
use crate::objectives::ObjectiveVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Strict,
    /// Equal in every objective.
    Weak,
    None,
}

/// Relation of `a` to `b`.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<Dominance> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(compare(a.as_slice(), b.as_slice()))
}

pub(crate) fn compare(a: &[f64], b: &[f64]) -> Dominance {
    let mut better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return Dominance::None;
        }
        if x < y {
            better = true;
        }
    }
    if better {
        Dominance::Strict
    } else {
        Dominance::Weak
    }
}

pub fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn strictly_dominates(a: &[f64], b: &[f64]) -> bool {
    compare(a, b) == Dominance::Strict
}

/// Fast non-dominated sort. Returns fronts of indices, best first, each in
/// ascending index order. Every index appears in exactly one front.
pub fn non_dominated_sort<V: AsRef<[f64]>>(points: &[V]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];

    for i in 0..n {
        for j in (i + 1)..n {
            match compare(points[i].as_ref(), points[j].as_ref()) {
                Dominance::Strict => {
                    dominates_list[i].push(j);
                    dominated_by_count[j] += 1;
                }
                Dominance::Weak => {}
                Dominance::None => {
                    if strictly_dominates(points[j].as_ref(), points[i].as_ref()) {
                        dominates_list[j].push(i);
                        dominated_by_count[i] += 1;
                    }
                }
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (indices into `points`).
/// Boundary points get `+inf`; objectives with zero spread contribute nothing.
pub fn crowding_distance<V: AsRef<[f64]>>(points: &[V], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m == 0 {
        return dist;
    }
    let k = points[front[0]].as_ref().len();
    let mut order: Vec<usize> = (0..m).collect();
    for obj in 0..k {
        let val = |pos: usize| points[front[pos]].as_ref()[obj];
        order.sort_by(|&a, &b| val(a).total_cmp(&val(b)).then(a.cmp(&b)));
        let lo = val(order[0]);
        let hi = val(order[m - 1]);
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        let spread = hi - lo;
        if spread <= 0.0 {
            continue;
        }
        for w in 1..m.saturating_sub(1) {
            let d = (val(order[w + 1]) - val(order[w - 1])) / spread;
            dist[order[w]] += d;
        }
    }
    dist
}

/// Picks `n` indices of `points`: whole fronts first, the overflowing front
/// truncated by descending crowding distance.
pub fn select_by_rank_and_crowding<V: AsRef<[f64]>>(points: &[V], n: usize) -> Vec<usize> {
    let n = n.min(points.len());
    let mut chosen = Vec::with_capacity(n);
    for front in non_dominated_sort(points) {
        let room = n - chosen.len();
        if room == 0 {
            break;
        }
        if front.len() <= room {
            chosen.extend_from_slice(&front);
        } else {
            let dist = crowding_distance(points, &front);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(a.cmp(&b)));
            chosen.extend(order.into_iter().take(room).map(|p| front[p]));
        }
    }
    chosen
}

/// Mutually non-dominated solutions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParetoFront {
    pub members: Vec<Individual>,
}

impl ParetoFront {
    pub fn new(members: Vec<Individual>) -> Self {
        Self { members }
    }

    /// Front without decision variables, e.g. read back from a report.
    pub fn from_objectives(points: Vec<ObjectiveVector>) -> Self {
        Self {
            members: points
                .into_iter()
                .map(|o| Individual::evaluated(Vec::new(), o, f64::NAN))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn num_objectives(&self) -> Option<usize> {
        self.members.first().map(|m| m.objectives().len())
    }

    pub fn points(&self) -> Vec<&[f64]> {
        self.members
            .iter()
            .map(|m| m.objectives().as_slice())
            .collect()
    }

    /// Drops members whose objective vector repeats an earlier member's.
    pub fn dedup(&self) -> Self {
        let mut out: Vec<Individual> = Vec::with_capacity(self.members.len());
        for m in &self.members {
            if !out.iter().any(|o| o.objectives() == m.objectives()) {
                out.push(m.clone());
            }
        }
        Self { members: out }
    }

    /// Ordered pairs `(i, j)`, `i != j`, where member `i` weakly dominates `j`.
    pub fn antichain_violations(&self) -> usize {
        let pts = self.points();
        let mut v = 0;
        for (i, a) in pts.iter().enumerate() {
            for (j, b) in pts.iter().enumerate() {
                if i != j && weakly_dominates(a, b) {
                    v += 1;
                }
            }
        }
        v
    }

    /// Lowest weighted-sum cost among members.
    pub fn best_cost(&self) -> f64 {
        self.members
            .iter()
            .map(|m| m.cost)
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_front(front: &ParetoFront) -> Result<usize> {
    let k = front.num_objectives().ok_or(Error::EmptyFront)?;
    if let Some(bad) = front.members.iter().find(|m| m.objectives().len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: bad.objectives().len(),
        });
    }
    Ok(k)
}

/// Mean over members of the product of their objective values
/// (duplicates removed first). Smaller is better.
pub fn normalized_hypervolume(front: &ParetoFront) -> Result<f64> {
    check_front(front)?;
    let front = front.dedup();
    let mut total = 0.0;
    for m in &front.members {
        let obj = m.objectives().as_slice();
        if obj.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::invalid("front", "objective values must be >= 0"));
        }
        total += obj.iter().product::<f64>();
    }
    Ok(total / front.len() as f64)
}

/// `(covered, |B|)`: how many members of `b` are weakly dominated by at least
/// one member of `a` (both fronts deduplicated first).
pub fn relative_coverage(a: &ParetoFront, b: &ParetoFront) -> Result<(usize, usize)> {
    let ka = check_front(a)?;
    let kb = check_front(b)?;
    if ka != kb {
        return Err(Error::DimensionMismatch {
            expected: ka,
            got: kb,
        });
    }
    let (a, b) = (a.dedup(), b.dedup());
    let pa = a.points();
    let covered = b
        .points()
        .iter()
        .filter(|pb| pa.iter().any(|x| weakly_dominates(x, pb)))
        .count();
    Ok((covered, b.len()))
}
