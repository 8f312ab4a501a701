use rayon::prelude::*;

use crate::propagation::{placement_lattice, CoverageStats, Deployment};

use super::candidates::CandidateCoverage;
use super::task::{PlanningTask, Scorer};
use super::OptimizeError;

/// Largest number of k-subsets the oracle will enumerate.
pub const MAX_COMBINATIONS: u128 = 10_000_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Result of an exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub deployment: Deployment,
    pub stats: CoverageStats,
    pub evaluated: u128,
}

/// Exhaustive search over all `k`-subsets of the placement lattice.
///
/// Returns the subset with the highest coverage; ties go to the first subset
/// in lexicographic order of (x, y)-sorted lattice positions.
pub fn brute_force_oracle(
    task: &PlanningTask,
    lattice_spacing: f64,
    k: usize,
) -> Result<OracleResult, OptimizeError> {
    let scorer = Scorer::new(task)?;
    if !(lattice_spacing > 0.0) {
        return Err(OptimizeError::InvalidParams("lattice spacing must be > 0".into()));
    }
    let lattice = placement_lattice(&task.plan, lattice_spacing);
    let total = binomial(lattice.len(), k);
    if k == 0 || total == 0 {
        return Err(OptimizeError::InvalidParams(format!(
            "no {k}-subset of {} lattice positions",
            lattice.len()
        )));
    }
    if total > MAX_COMBINATIONS {
        return Err(OptimizeError::SearchSpaceTooLarge {
            combinations: total,
            limit: MAX_COMBINATIONS,
        });
    }
    let cov = CandidateCoverage::build(scorer.evaluator(), task.threshold, lattice);
    let n = cov.len();

    // Best subset for each leading index, then the first maximum overall.
    let per_head: Vec<(usize, Vec<usize>)> = (0..=n - k)
        .into_par_iter()
        .map(|head| {
            let mut best = (0usize, Vec::new());
            let mut found = false;
            let mut idx: Vec<usize> = (head..head + k).collect();
            loop {
                let c = cov.covered(&idx);
                if !found || c > best.0 {
                    best = (c, idx.clone());
                    found = true;
                }
                if !next_tail(&mut idx, n) {
                    break;
                }
            }
            best
        })
        .collect();
    let (_, chosen) = per_head
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one subset");

    let aps: Vec<_> = chosen.iter().map(|&i| cov.positions[i]).collect();
    let stats = scorer
        .feedback(0, &aps)
        .stats
        .expect("lattice positions are valid");
    Ok(OracleResult {
        deployment: Deployment::new(aps, task.radio),
        stats,
        evaluated: total,
    })
}

/// Advances `idx[1..]` to the next combination with `idx[0]` fixed.
fn next_tail(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 1 {
        i -= 1;
        if idx[i] < n - (k - i) {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(200, 2), 19_900);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn tail_enumeration_covers_all_subsets() {
        let n = 6;
        let k = 3;
        let mut count = 0;
        for head in 0..=n - k {
            let mut idx: Vec<usize> = (head..head + k).collect();
            loop {
                count += 1;
                if !next_tail(&mut idx, n) {
                    break;
                }
            }
        }
        assert_eq!(count as u128, binomial(n, k));
    }
}
