use super::{SetCoverInstance, SetSelection};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverSolution {
    pub size: usize,
    pub witness: SetSelection,
}

/// Minimum set cover by iterative deepening on the cover size.
///
/// Subsets of each size are explored in lexicographic order of their sorted index
/// lists, so the returned witness is the lexicographically smallest minimum cover.
/// Branches die when the first uncovered element has no zero at or after the next
/// candidate index, or when the remaining picks cannot reach the uncovered count.
pub fn opt_exact(inst: &SetCoverInstance) -> CoverSolution {
    let n = inst.n();
    let full = inst.full();
    let zeros: Vec<u64> = inst.universe().iter().map(|&u| !u & full).collect();
    let coverage: Vec<usize> = (0..n)
        .map(|i| zeros.iter().filter(|&&z| z >> i & 1 == 1).count())
        .collect();
    let mut search = Search {
        n,
        zeros: &zeros,
        coverage: &coverage,
    };
    for k in 1..=n {
        if let Some(sel) = search.run(k) {
            return CoverSolution {
                size: k,
                witness: SetSelection(sel),
            };
        }
    }
    unreachable!("the full selection always covers a valid instance")
}

struct Search<'a> {
    n: usize,
    zeros: &'a [u64],
    coverage: &'a [usize],
}

impl Search<'_> {
    fn run(&mut self, k: usize) -> Option<u64> {
        let uncovered: Vec<usize> = (0..self.zeros.len()).collect();
        self.dfs(0, k, 0, &uncovered)
    }

    fn dfs(&self, start: usize, left: usize, chosen: u64, uncovered: &[usize]) -> Option<u64> {
        let Some(&first) = uncovered.first() else {
            return Some(chosen);
        };
        if left == 0 {
            return None;
        }
        let future = if start >= 64 { 0 } else { u64::MAX << start };
        if self.zeros[first] & future == 0 {
            return None;
        }
        let best: usize = {
            let mut cov: Vec<usize> = (start..self.n).map(|i| self.coverage[i]).collect();
            cov.sort_unstable_by(|a, b| b.cmp(a));
            cov.iter().take(left).sum()
        };
        if best < uncovered.len() {
            return None;
        }
        for i in start..self.n {
            let rest: Vec<usize> = uncovered
                .iter()
                .copied()
                .filter(|&e| self.zeros[e] >> i & 1 == 0)
                .collect();
            if let Some(sel) = self.dfs(i + 1, left - 1, chosen | 1 << i, &rest) {
                return Some(sel);
            }
        }
        None
    }
}

/// Classic greedy: repeatedly take the set covering the most uncovered elements,
/// lowest index on ties.
pub fn greedy_cover(inst: &SetCoverInstance) -> SetSelection {
    let full = inst.full();
    let mut uncovered: Vec<u64> = inst.universe().iter().map(|&u| !u & full).collect();
    let mut sel = 0u64;
    while !uncovered.is_empty() {
        let (best, _) = (0..inst.n())
            .map(|i| (i, uncovered.iter().filter(|&&z| z >> i & 1 == 1).count()))
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        sel |= 1 << best;
        uncovered.retain(|&z| z >> best & 1 == 0);
    }
    SetSelection(sel)
}
