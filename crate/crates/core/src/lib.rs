//! Greedy multi-heuristic solver for the container pre-marshalling problem.
//!
//! A [`Bay`] holds stacks of prioritized blocks. The solver rearranges it so
//! that every stack is non-increasing from bottom to top, trying each of the
//! 48 [`HeuristicConfig`]s and keeping the shortest result.

pub mod bay;
pub mod bench;
pub mod config;
pub mod engine;
pub mod generate;
pub mod instance;
pub mod oracle;
pub mod portfolio;
pub mod reloc;
pub mod scores;

pub use bay::{Bay, BayError, Move, Priority, StackSet};
pub use config::{BlockSelect, HeuristicConfig};
pub use engine::{correct, is_valid, solve, solve_with_stats, verify, Solution, SolveError};
pub use generate::{BayClass, BENCHMARK_CLASSES};
pub use instance::Instance;
pub use portfolio::{run_portfolio, PortfolioResult};
pub use reloc::{FillPolicy, RelocRule};
pub use scores::DestScore;
