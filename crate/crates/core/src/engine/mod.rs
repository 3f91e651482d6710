//! The greedy loop: pick a misplaced block, pick its destination, clear the
//! way, move it, then fill the destination. Deadlocks on the own-stack path are
//! repaired in place and the final move list is cleaned up by [`correct`].

mod correction;
mod verify;

use std::collections::HashSet;

use thiserror::Error;

use crate::bay::{Bay, BayError, Move, Priority, StackSet};
use crate::config::{BlockSelect, HeuristicConfig};
use crate::reloc::{
    choose_reloc_target, choose_temp_target_for_c, fill_stack, next_blocking_to_move, RelocRule,
    RelocationPlan,
};
use crate::scores::{
    f_score, infeasible_destinations, non_well_located_blocks, select_block_lookahead,
    select_block_max_priority, select_destination, DestScore, TargetBlock,
};

pub use correction::correct;
pub use verify::{is_valid, verify, VerifyError};

/// Moves are capped at this multiple of the block count.
pub const MOVE_BUDGET_FACTOR: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Solution {
    pub moves: Vec<Move>,
    pub config_label: String,
}

impl Solution {
    pub fn new(moves: Vec<Move>, config_label: impl Into<String>) -> Self {
        Solution {
            moves,
            config_label: config_label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the bay has no free slot, so no move is possible")]
    Infeasible,
    #[error("no misplaced block can be well located from the current state")]
    Stuck,
    #[error("deadlock repair found no full stack to borrow a slot from")]
    UnresolvableDeadlock,
    #[error("move budget of {0} exceeded")]
    MoveBudget(usize),
    #[error("the engine returned to a state it had already visited")]
    Cycle,
    #[error("engine produced an illegal move: {0}")]
    Illegal(#[from] BayError),
    #[error("solution failed verification: {0}")]
    Verification(#[from] VerifyError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Outer iterations, one per well-located target.
    pub iterations: usize,
    /// Moves appended by each deadlock repair.
    pub deadlock_repairs: Vec<usize>,
    /// Length of the move list before correction.
    pub raw_moves: usize,
    /// Target priorities in the order they were well located.
    pub targets: Vec<Priority>,
    /// Targets that had to be parked before their destination could be cleared.
    pub parked_escapes: usize,
}

/// The working bay together with the moves that produced it.
#[derive(Clone, Debug)]
pub struct EngineState {
    pub bay: Bay,
    pub moves: Vec<Move>,
}

impl EngineState {
    pub fn new(bay: Bay) -> Self {
        EngineState {
            bay,
            moves: Vec::new(),
        }
    }

    pub fn push(&mut self, mv: Move) -> Result<Priority, BayError> {
        let p = self.bay.apply(mv)?;
        self.moves.push(mv);
        Ok(p)
    }

    fn checkpoint(&self) -> (Bay, usize) {
        (self.bay.clone(), self.moves.len())
    }

    fn restore(&mut self, (bay, len): (Bay, usize)) {
        self.bay = bay;
        self.moves.truncate(len);
    }
}

/// Result of a deadlock repair: the moves appended and where the target now waits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeadlockRepair {
    pub appended: Vec<Move>,
    pub parked_on: usize,
}

/// Frees a slot while the target sits parked on `parked` and the blocks under
/// its old position on `source` have nowhere to go.
///
/// The last relocation `(source, r)` is taken back, the top of the first full
/// stack outside `{source, parked}` drops into the reopened slot, and the
/// target moves up onto the now one-short full stack, where it costs no slots.
/// If the undone relocation was a blocker rather than the target itself, that
/// blocker is redone onto the spot the target vacated. At most three moves are
/// appended.
pub fn resolve_deadlock(
    state: &mut EngineState,
    source: usize,
    parked: usize,
) -> Result<DeadlockRepair, SolveError> {
    let last = state.moves.pop().ok_or(SolveError::UnresolvableDeadlock)?;
    debug_assert_eq!(last.from, source);
    state.bay.undo(last)?;
    let except = StackSet::of(&[source, parked]);
    let full = (0..state.bay.width())
        .find(|&i| !except.contains(i) && state.bay.is_full(i))
        .ok_or(SolveError::UnresolvableDeadlock)?;
    let appended = if last.to == parked {
        vec![Move::new(full, parked), Move::new(source, full)]
    } else {
        vec![
            Move::new(full, last.to),
            Move::new(parked, full),
            Move::new(source, parked),
        ]
    };
    for &mv in &appended {
        state.push(mv)?;
    }
    Ok(DeadlockRepair {
        appended,
        parked_on: full,
    })
}

fn relocate_blocker(
    state: &mut EngineState,
    from: usize,
    rule: RelocRule,
    excluded: StackSet,
) -> Result<(), SolveError> {
    let r = state.bay.top(from).expect("blocker exists");
    let to = choose_reloc_target(&state.bay, r, rule, excluded).map_err(|_| SolveError::Stuck)?;
    state.push(Move::new(from, to))?;
    Ok(())
}

/// Moves `c` onto `dest` so that it ends up well located.
fn well_locate(
    state: &mut EngineState,
    c: &TargetBlock,
    dest: usize,
    rule: RelocRule,
    stats: &mut SolveStats,
) -> Result<(), SolveError> {
    let source = c.stack;
    let mut plan = RelocationPlan::for_target(&state.bay, c, dest);
    if dest != source {
        let blocked = StackSet::of(&[source, dest]);
        while let Some(side) = next_blocking_to_move(&state.bay, &plan) {
            plan.take(side);
            relocate_blocker(state, side, rule, blocked)?;
        }
        state.push(Move::new(source, dest))?;
        return Ok(());
    }

    let below = plan.from_source - c.depth - 1;
    for _ in 0..c.depth {
        relocate_blocker(state, source, rule, StackSet::EMPTY.with(source))?;
    }
    let mut parked =
        choose_temp_target_for_c(&state.bay, c.priority, rule, StackSet::EMPTY.with(source))
            .map_err(|_| SolveError::Stuck)?;
    state.push(Move::new(source, parked))?;
    for _ in 0..below {
        let excluded = StackSet::of(&[source, parked]);
        let r = state.bay.top(source).expect("blocker exists");
        let to = match choose_reloc_target(&state.bay, r, rule, excluded) {
            Ok(to) => to,
            Err(_) => {
                let repair = resolve_deadlock(state, source, parked)?;
                stats.deadlock_repairs.push(repair.appended.len());
                parked = repair.parked_on;
                choose_reloc_target(&state.bay, r, rule, StackSet::of(&[source, parked]))
                    .map_err(|_| SolveError::UnresolvableDeadlock)?
            }
        };
        state.push(Move::new(source, to))?;
    }
    state.push(Move::new(parked, source))?;
    Ok(())
}

fn fallback_targets(bay: &Bay, skip: Option<TargetBlock>) -> Vec<TargetBlock> {
    let mut rest: Vec<TargetBlock> = non_well_located_blocks(bay)
        .into_iter()
        .filter(|b| Some(*b) != skip)
        .collect();
    rest.sort_by_key(|b| (std::cmp::Reverse(b.priority), b.stack, b.depth));
    rest
}

/// Last resort for `dest != c.stack` when the blocks on `dest` have nowhere
/// to go: `c` is parked on a third stack first, so its own stack can take
/// them.
fn well_locate_parked(
    state: &mut EngineState,
    c: &TargetBlock,
    dest: usize,
    rule: RelocRule,
) -> Result<(), SolveError> {
    let source = c.stack;
    let both = StackSet::of(&[source, dest]);
    for _ in 0..c.depth {
        relocate_blocker(state, source, rule, both)?;
    }
    let parked = choose_temp_target_for_c(&state.bay, c.priority, rule, both)
        .map_err(|_| SolveError::Stuck)?;
    state.push(Move::new(source, parked))?;
    let lifted = f_score(&state.bay, &TargetBlock::at(&state.bay, parked, 0), dest);
    for _ in 0..lifted {
        relocate_blocker(state, dest, rule, StackSet::of(&[dest, parked]))?;
    }
    state.push(Move::new(parked, dest))?;
    Ok(())
}

/// Runs `f`, rolling the state back if it gets stuck.
fn attempt(
    state: &mut EngineState,
    stats: &mut SolveStats,
    f: impl FnOnce(&mut EngineState, &mut SolveStats) -> Result<(), SolveError>,
) -> Result<bool, SolveError> {
    let checkpoint = state.checkpoint();
    let repairs = stats.deadlock_repairs.len();
    match f(state, stats) {
        Ok(()) => Ok(true),
        Err(SolveError::Stuck | SolveError::UnresolvableDeadlock) => {
            state.restore(checkpoint);
            stats.deadlock_repairs.truncate(repairs);
            Ok(false)
        }
        Err(e) => Err(e),
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    target: TargetBlock,
    dest: usize,
    parked: bool,
}

/// Destinations for `target` in preference order. Direct candidates skip
/// stacks without room for the relocations; parked ones try every other stack.
fn candidates(bay: &Bay, target: TargetBlock, score: DestScore, parked: bool) -> Vec<Candidate> {
    let mut excluded = if parked {
        StackSet::EMPTY.with(target.stack)
    } else {
        infeasible_destinations(bay, &target)
    };
    let mut out = Vec::new();
    while let Ok(choice) = select_destination(bay, &target, score, excluded) {
        out.push(Candidate {
            target,
            dest: choice.stack,
            parked,
        });
        excluded.insert(choice.stack);
    }
    out
}

fn execute(
    state: &mut EngineState,
    stats: &mut SolveStats,
    opt: Candidate,
    config: &HeuristicConfig,
) -> Result<bool, SolveError> {
    let rule = config.reloc_rule;
    let done = if opt.parked {
        attempt(state, stats, |st, _| {
            well_locate_parked(st, &opt.target, opt.dest, rule)
        })?
    } else {
        attempt(state, stats, |st, stats| {
            well_locate(st, &opt.target, opt.dest, rule, stats)
        })?
    };
    if done {
        for mv in fill_stack(&state.bay, opt.dest, config.fill) {
            state.push(mv)?;
        }
        stats.targets.push(opt.target.priority);
        stats.parked_escapes += opt.parked as usize;
    }
    Ok(done)
}

/// Whether some target can still be well located from `bay`.
fn has_next_step(bay: &Bay, config: &HeuristicConfig) -> Result<bool, SolveError> {
    let targets = non_well_located_blocks(bay);
    if targets.is_empty()
        || targets
            .iter()
            .any(|t| !candidates(bay, *t, config.dest_score, false).is_empty())
    {
        return Ok(true);
    }
    for t in targets {
        for c in candidates(bay, t, config.dest_score, true) {
            let mut scratch = EngineState::new(bay.clone());
            if attempt(&mut scratch, &mut SolveStats::default(), |st, _| {
                well_locate_parked(st, &c.target, c.dest, config.reloc_rule)
            })? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// One outer iteration: well locates one block and fills its stack.
///
/// Targets are tried in order: the selected block, then the other misplaced
/// blocks by priority, first directly and then parked. A candidate that
/// leaves no possible next step is only taken when every candidate does.
fn step(
    state: &mut EngineState,
    config: &HeuristicConfig,
    stats: &mut SolveStats,
) -> Result<(), SolveError> {
    let bay = state.bay.clone();
    let primary = match config.block_select {
        BlockSelect::MaxPriority => select_block_max_priority(&bay),
        BlockSelect::Lookahead => select_block_lookahead(&bay),
    };
    let targets = || {
        primary
            .into_iter()
            .chain(std::iter::once_with(|| fallback_targets(&bay, primary)).flatten())
    };
    let all = targets()
        .flat_map(|t| candidates(&bay, t, config.dest_score, false))
        .chain(
            std::iter::once_with(|| targets().collect::<Vec<_>>())
                .flatten()
                .flat_map(|t| candidates(&bay, t, config.dest_score, true)),
        );
    let mut dead_end: Option<(EngineState, SolveStats)> = None;
    for cand in all {
        let before = (state.clone(), stats.clone());
        if !execute(state, stats, cand, config)? {
            continue;
        }
        if has_next_step(&state.bay, config)? {
            return Ok(());
        }
        let after = std::mem::replace(state, before.0);
        let after_stats = std::mem::replace(stats, before.1);
        dead_end.get_or_insert((after, after_stats));
    }
    match dead_end {
        Some((s, st)) => {
            *state = s;
            *stats = st;
            Ok(())
        }
        None => Err(SolveError::Stuck),
    }
}

pub fn solve(initial: &Bay, config: &HeuristicConfig) -> Result<Solution, SolveError> {
    solve_with_stats(initial, config).map(|(sol, _)| sol)
}

/// Runs the greedy loop under `config`, then corrects and verifies the result.
pub fn solve_with_stats(
    initial: &Bay,
    config: &HeuristicConfig,
) -> Result<(Solution, SolveStats), SolveError> {
    let mut stats = SolveStats::default();
    let label = config.label();
    if initial.all_well_located() {
        return Ok((Solution::new(Vec::new(), label), stats));
    }
    if initial.free_slots() == 0 {
        return Err(SolveError::Infeasible);
    }
    let budget = MOVE_BUDGET_FACTOR * initial.num_blocks();
    let mut state = EngineState::new(initial.clone());
    let mut seen = HashSet::new();
    while !state.bay.all_well_located() {
        if !seen.insert(state.bay.clone()) {
            return Err(SolveError::Cycle);
        }
        step(&mut state, config, &mut stats)?;
        stats.iterations += 1;
        if state.moves.len() > budget {
            return Err(SolveError::MoveBudget(budget));
        }
    }
    stats.raw_moves = state.moves.len();
    let solution = Solution::new(correct(&state.moves), label);
    verify(initial, &solution)?;
    Ok((solution, stats))
}
