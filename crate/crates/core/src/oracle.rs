//! Exact solver for tiny bays, used as ground truth.
//!
//! Iterative deepening on the move count with the number of misplaced blocks
//! as lower bound: every misplaced block sits above a smaller one and has to
//! move at least once. Within one iteration a transposition table keyed on the
//! bay with its stacks sorted skips states already reached with fewer moves.
//! Sorting is sound because relabeling stacks changes neither the goal nor the
//! cost of any move sequence.

use std::collections::HashMap;

use crate::bay::{Bay, Move, Priority};
use crate::engine::{verify, Solution};
use crate::portfolio::run_portfolio;

pub const ORACLE_LABEL: &str = "oracle";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub optimal_moves: usize,
    pub solution: Solution,
    pub nodes_expanded: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Solved(OracleResult),
    /// No solution within the cap; `nodes_expanded` counts all iterations.
    CapExceeded {
        move_cap: usize,
        nodes_expanded: u64,
    },
}

impl OracleOutcome {
    pub fn optimum(&self) -> Option<usize> {
        match self {
            OracleOutcome::Solved(r) => Some(r.optimal_moves),
            OracleOutcome::CapExceeded { .. } => None,
        }
    }

    pub fn nodes_expanded(&self) -> u64 {
        match self {
            OracleOutcome::Solved(r) => r.nodes_expanded,
            OracleOutcome::CapExceeded { nodes_expanded, .. } => *nodes_expanded,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub move_cap: usize,
    pub transpositions: bool,
}

impl OracleOptions {
    pub fn new(move_cap: usize) -> Self {
        OracleOptions {
            move_cap,
            transpositions: true,
        }
    }
}

fn canonical(bay: &Bay) -> Vec<Vec<Priority>> {
    let mut s = bay.stacks().to_vec();
    s.sort_unstable();
    s
}

struct Search {
    bound: usize,
    table: Option<HashMap<Vec<Vec<Priority>>, usize>>,
    path: Vec<Move>,
    nodes: u64,
}

impl Search {
    fn dfs(&mut self, bay: &mut Bay, g: usize) -> bool {
        let h = bay.nwl_total();
        if h == 0 {
            return true;
        }
        if g + h > self.bound {
            return false;
        }
        if let Some(table) = &mut self.table {
            let key = canonical(bay);
            match table.get(&key) {
                Some(&seen) if seen <= g => return false,
                _ => {
                    table.insert(key, g);
                }
            }
        }
        self.nodes += 1;
        let last_to = self.path.last().map(|m| m.to);
        for from in 0..bay.width() {
            // moving the block just placed again is never optimal
            if Some(from) == last_to || bay.height(from) == 0 {
                continue;
            }
            for to in 0..bay.width() {
                if to == from || bay.is_full(to) {
                    continue;
                }
                let mv = Move::new(from, to);
                bay.apply(mv).expect("checked");
                self.path.push(mv);
                if self.dfs(bay, g + 1) {
                    return true;
                }
                self.path.pop();
                bay.undo(mv).expect("just applied");
            }
        }
        false
    }
}

pub fn solve_exact(initial: &Bay, options: OracleOptions) -> OracleOutcome {
    let mut nodes = 0;
    if initial.free_slots() == 0 && !initial.all_well_located() {
        return OracleOutcome::CapExceeded {
            move_cap: options.move_cap,
            nodes_expanded: 0,
        };
    }
    for bound in initial.nwl_total()..=options.move_cap {
        let mut search = Search {
            bound,
            table: options.transpositions.then(HashMap::new),
            path: Vec::new(),
            nodes: 0,
        };
        let mut bay = initial.clone();
        let found = search.dfs(&mut bay, 0);
        nodes += search.nodes;
        if found {
            let solution = Solution::new(search.path, ORACLE_LABEL);
            debug_assert!(verify(initial, &solution).is_ok());
            return OracleOutcome::Solved(OracleResult {
                optimal_moves: solution.len(),
                solution,
                nodes_expanded: nodes,
            });
        }
    }
    OracleOutcome::CapExceeded {
        move_cap: options.move_cap,
        nodes_expanded: nodes,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapRow {
    pub name: String,
    pub portfolio: usize,
    /// `None` when the oracle hit its cap.
    pub optimum: Option<usize>,
}

impl GapRow {
    pub fn gap(&self) -> Option<usize> {
        self.optimum.map(|o| self.portfolio - o)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
}

impl GapReport {
    pub fn solved(&self) -> impl Iterator<Item = &GapRow> {
        self.rows.iter().filter(|r| r.optimum.is_some())
    }

    pub fn mean_gap(&self) -> f64 {
        let gaps: Vec<usize> = self.solved().filter_map(GapRow::gap).collect();
        if gaps.is_empty() {
            0.0
        } else {
            gaps.iter().sum::<usize>() as f64 / gaps.len() as f64
        }
    }

    /// Share of oracle-solved rows where the portfolio is optimal.
    pub fn match_fraction(&self) -> f64 {
        let solved = self.solved().count();
        if solved == 0 {
            return 1.0;
        }
        self.solved().filter(|r| r.gap() == Some(0)).count() as f64 / solved as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,portfolio,optimum,gap\n");
        for r in &self.rows {
            let opt = r
                .optimum
                .map_or_else(|| "cap".to_owned(), |o| o.to_string());
            let gap = r.gap().map_or_else(|| "cap".to_owned(), |g| g.to_string());
            out.push_str(&format!("{},{},{},{}\n", r.name, r.portfolio, opt, gap));
        }
        out.push_str(&format!("mean,,,{:.2}\n", self.mean_gap()));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GapError {
    #[error("{name}: portfolio failed: {source}")]
    Portfolio {
        name: String,
        source: crate::engine::SolveError,
    },
    #[error("{name}: portfolio found {portfolio} moves, below the optimum {optimum}")]
    BelowOptimum {
        name: String,
        portfolio: usize,
        optimum: usize,
    },
}

/// Portfolio best against the exact optimum for each named bay.
pub fn gap_report<'a>(
    instances: impl IntoIterator<Item = (&'a str, &'a Bay)>,
    move_cap: usize,
    safe_slack: usize,
) -> Result<GapReport, GapError> {
    let mut rows = Vec::new();
    for (name, bay) in instances {
        let portfolio = run_portfolio(bay, safe_slack)
            .map_err(|source| GapError::Portfolio {
                name: name.to_owned(),
                source,
            })?
            .best_len();
        let optimum = solve_exact(bay, OracleOptions::new(move_cap)).optimum();
        if let Some(o) = optimum {
            if portfolio < o {
                return Err(GapError::BelowOptimum {
                    name: name.to_owned(),
                    portfolio,
                    optimum: o,
                });
            }
        }
        rows.push(GapRow {
            name: name.to_owned(),
            portfolio,
            optimum,
        });
    }
    Ok(GapReport { rows })
}

/// Every bay with `width` stacks, cap `max_height` and blocks `1..=n`, each
/// placement once, in a fixed order.
pub fn exhaustive_bays(width: usize, max_height: usize, n: usize) -> Vec<Bay> {
    let mut shapes = Vec::new();
    compositions(n, width, max_height, &mut Vec::new(), &mut shapes);
    let mut perms = Vec::new();
    permutations(&mut (1..=n as Priority).collect(), 0, &mut perms);
    perms.sort();
    let mut out = Vec::with_capacity(shapes.len() * perms.len());
    for shape in &shapes {
        for perm in &perms {
            let mut rest = &perm[..];
            let mut stacks = Vec::with_capacity(width);
            for &h in shape {
                let (mine, tail) = rest.split_at(h);
                stacks.push(mine.to_vec());
                rest = tail;
            }
            out.push(Bay::new(max_height, stacks).expect("valid by construction"));
        }
    }
    out
}

fn compositions(
    n: usize,
    parts: usize,
    cap: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if cur.len() == parts {
        if n == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for h in 0..=n.min(cap) {
        cur.push(h);
        compositions(n - h, parts, cap, cur, out);
        cur.pop();
    }
}

fn permutations(items: &mut Vec<Priority>, k: usize, out: &mut Vec<Vec<Priority>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bay(h: usize, stacks: &[&[Priority]]) -> Bay {
        Bay::new(h, stacks.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    fn optimum(b: &Bay) -> usize {
        solve_exact(b, OracleOptions::new(20)).optimum().unwrap()
    }

    #[test]
    fn sorted_is_zero() {
        assert_eq!(optimum(&bay(4, &[&[3, 1], &[2], &[]])), 0);
    }

    #[test]
    fn one_move() {
        let b = bay(4, &[&[1, 3], &[2], &[]]);
        let OracleOutcome::Solved(r) = solve_exact(&b, OracleOptions::new(5)) else {
            panic!("expected a solution")
        };
        assert_eq!(r.optimal_moves, 1);
        assert_eq!(r.solution.moves, vec![Move::new(0, 2)]);
    }

    #[test]
    fn frozen_small_fixture() {
        // value found by the oracle on its first verified run
        let b = bay(3, &[&[2, 3], &[1], &[]]);
        assert_eq!(optimum(&b), FIXTURE_2_3_1);
    }

    const FIXTURE_2_3_1: usize = 1;

    #[test]
    fn cap_exceeded() {
        let b = bay(3, &[&[1, 2, 3], &[4, 5, 6], &[]]);
        let out = solve_exact(&b, OracleOptions::new(2));
        assert!(matches!(
            out,
            OracleOutcome::CapExceeded { move_cap: 2, .. }
        ));
        assert_eq!(out.optimum(), None);
    }

    #[test]
    fn solutions_verify_and_respect_bound() {
        for b in exhaustive_bays(3, 3, 4).into_iter().step_by(7) {
            let OracleOutcome::Solved(r) = solve_exact(&b, OracleOptions::new(20)) else {
                panic!("tiny bay unsolved")
            };
            assert!(verify(&b, &r.solution).is_ok());
            assert_eq!(r.solution.len(), r.optimal_moves);
            assert!(r.optimal_moves >= b.nwl_total());
        }
    }

    #[test]
    fn exhaustive_set_size() {
        let all = exhaustive_bays(3, 3, 4);
        assert_eq!(all.len(), 288);
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 288);
    }

    #[test]
    fn gap_report_on_sorted_set() {
        let a = bay(3, &[&[3, 1], &[2], &[]]);
        let b = bay(3, &[&[], &[4, 2], &[3]]);
        let report = gap_report([("a", &a), ("b", &b)], 10, 0).unwrap();
        assert!(report.rows.iter().all(|r| r.gap() == Some(0)));
        assert_eq!(report.mean_gap(), 0.0);
        assert_eq!(report.match_fraction(), 1.0);
        assert!(report.to_csv().ends_with("mean,,,0.00\n"));
    }
}
