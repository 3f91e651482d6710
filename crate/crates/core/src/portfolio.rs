//! Runs every configuration on one bay and keeps the shortest solution.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::bay::Bay;
use crate::config::HeuristicConfig;
use crate::engine::{solve, Solution, SolveError};

#[derive(Clone, Debug)]
pub struct PortfolioResult {
    pub best: Solution,
    /// Move count, or the failure, of each configuration keyed by label.
    pub per_config: BTreeMap<String, Result<usize, SolveError>>,
    pub wall_time: Duration,
}

impl PortfolioResult {
    pub fn best_len(&self) -> usize {
        self.best.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &SolveError)> {
        self.per_config
            .iter()
            .filter_map(|(k, v)| v.as_ref().err().map(|e| (k.as_str(), e)))
    }
}

/// Solves `initial` under every configuration in `configs`. The shortest
/// verified solution wins; ties go to the smallest label. Fails only if
/// every configuration fails, returning the first error by label.
pub fn run_configs(
    initial: &Bay,
    configs: &[HeuristicConfig],
) -> Result<PortfolioResult, SolveError> {
    let start = Instant::now();
    let mut per_config = BTreeMap::new();
    let mut best: Option<Solution> = None;
    for cfg in configs {
        let outcome = solve(initial, cfg);
        if let Ok(sol) = &outcome {
            let better = best
                .as_ref()
                .is_none_or(|b| (sol.len(), &sol.config_label) < (b.len(), &b.config_label));
            if better {
                best = Some(sol.clone());
            }
        }
        per_config.insert(cfg.label(), outcome.map(|s| s.len()));
    }
    let wall_time = start.elapsed();
    match best {
        Some(best) => Ok(PortfolioResult {
            best,
            per_config,
            wall_time,
        }),
        None => Err(per_config
            .into_values()
            .find_map(Result::err)
            .unwrap_or(SolveError::Stuck)),
    }
}

/// [`run_configs`] over all 48 configurations.
pub fn run_portfolio(initial: &Bay, safe_slack: usize) -> Result<PortfolioResult, SolveError> {
    run_configs(initial, &HeuristicConfig::all(safe_slack))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_bay() {
        let b = Bay::new(4, vec![vec![3, 1], vec![2], vec![]]).unwrap();
        let r = run_portfolio(&b, 0).unwrap();
        assert_eq!(r.best_len(), 0);
        assert_eq!(r.per_config.len(), 48);
        assert!(r.per_config.values().all(|v| *v == Ok(0)));
        assert_eq!(r.best.config_label, "lookahead-w-lpi-none");
    }

    #[test]
    fn best_is_minimum() {
        let b = Bay::new(5, vec![vec![3, 7, 1], vec![5, 2, 8], vec![6, 4], vec![9]]).unwrap();
        let r = run_portfolio(&b, 0).unwrap();
        for v in r.per_config.values() {
            assert!(r.best_len() <= *v.as_ref().unwrap());
        }
        let min = r
            .per_config
            .values()
            .map(|v| *v.as_ref().unwrap())
            .min()
            .unwrap();
        assert_eq!(r.best_len(), min);
        assert_eq!(r.per_config[&r.best.config_label], Ok(min));
    }

    #[test]
    fn one_move_instance() {
        let b = Bay::new(4, vec![vec![1, 3], vec![2], vec![]]).unwrap();
        assert_eq!(run_portfolio(&b, 0).unwrap().best_len(), 1);
    }

    #[test]
    fn full_bay_fails() {
        let b = Bay::new(1, vec![vec![1], vec![2]]).unwrap();
        assert!(run_portfolio(&b, 0).is_ok());
        let b = Bay::new(1, vec![vec![2], vec![1]]).unwrap();
        assert!(run_portfolio(&b, 0).is_ok());
        let b = Bay::new(2, vec![vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(run_portfolio(&b, 0).unwrap_err(), SolveError::Infeasible);
    }
}
