//! Relocating the blocks in the way of a target block, and filling a freshly
//! well-located destination stack afterwards.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bay::{Bay, Move, Priority, StackSet};
use crate::scores::{f_score, TargetBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no feasible destination stack")]
pub struct NoFeasibleDestination;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} '{value}'")]
pub struct UnknownName {
    pub kind: &'static str,
    pub value: String,
}

/// Where a blocking block goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelocRule {
    /// Lowest stack first.
    Tlp,
    /// Stack whose highest misplaced block is smallest, so it is disturbed last.
    Lpi,
    /// Tightest non-blocking stack, else the least urgent blocking one.
    MinMax,
}

impl RelocRule {
    pub const ALL: [RelocRule; 3] = [RelocRule::Tlp, RelocRule::Lpi, RelocRule::MinMax];

    pub fn label(self) -> &'static str {
        match self {
            RelocRule::Tlp => "tlp",
            RelocRule::Lpi => "lpi",
            RelocRule::MinMax => "minmax",
        }
    }
}

impl fmt::Display for RelocRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RelocRule {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelocRule::ALL
            .into_iter()
            .find(|r| r.label() == s)
            .ok_or_else(|| UnknownName {
                kind: "relocation rule",
                value: s.to_owned(),
            })
    }
}

/// What to do with the free slots above a block that was just well located.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FillPolicy {
    None,
    Standard,
    /// Standard filling, kept only if it leaves at most `slack` free slots.
    Safe {
        slack: usize,
    },
    /// Standard filling that halts before uncovering a larger block which has
    /// a well-located spot waiting for it.
    Stop,
}

impl FillPolicy {
    pub fn all(safe_slack: usize) -> [FillPolicy; 4] {
        [
            FillPolicy::None,
            FillPolicy::Standard,
            FillPolicy::Safe { slack: safe_slack },
            FillPolicy::Stop,
        ]
    }

    pub fn label(self) -> &'static str {
        match self {
            FillPolicy::None => "none",
            FillPolicy::Standard => "standard",
            FillPolicy::Safe { .. } => "safe",
            FillPolicy::Stop => "stop",
        }
    }

    pub fn parse(s: &str, safe_slack: usize) -> Result<Self, UnknownName> {
        FillPolicy::all(safe_slack)
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| UnknownName {
                kind: "fill policy",
                value: s.to_owned(),
            })
    }
}

impl fmt::Display for FillPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Blocks still to be lifted off the target's stack and off the destination.
/// When the target stays on its own stack everything is lifted from `source`,
/// the target included.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelocationPlan {
    pub source: usize,
    pub dest: usize,
    pub from_source: usize,
    pub from_dest: usize,
}

impl RelocationPlan {
    pub fn for_target(bay: &Bay, c: &TargetBlock, dest: usize) -> Self {
        if dest == c.stack {
            RelocationPlan {
                source: c.stack,
                dest,
                from_source: f_score(bay, c, dest),
                from_dest: 0,
            }
        } else {
            RelocationPlan {
                source: c.stack,
                dest,
                from_source: c.depth,
                from_dest: f_score(bay, c, dest),
            }
        }
    }

    pub fn remaining(&self) -> usize {
        self.from_source + self.from_dest
    }

    /// Marks one block of `side` as lifted.
    pub fn take(&mut self, side: usize) {
        if side == self.source && self.from_source > 0 {
            self.from_source -= 1;
        } else {
            debug_assert!(side == self.dest && self.from_dest > 0);
            self.from_dest -= 1;
        }
    }
}

/// The stack to lift from next: whichever required top block has the higher
/// priority, the source side on ties.
pub fn next_blocking_to_move(bay: &Bay, plan: &RelocationPlan) -> Option<usize> {
    match (plan.from_source > 0, plan.from_dest > 0) {
        (false, false) => None,
        (true, false) => Some(plan.source),
        (false, true) => Some(plan.dest),
        (true, true) => {
            let s = bay.top(plan.source).unwrap_or(0);
            let d = bay.top(plan.dest).unwrap_or(0);
            Some(if d > s { plan.dest } else { plan.source })
        }
    }
}

/// Ranking of stack `i` as a home for a block of priority `p`; smaller is better.
fn rank(bay: &Bay, i: usize, p: Priority, rule: RelocRule) -> [i64; 5] {
    let height = bay.height(i) as i64;
    let reaches_top = (bay.height(i) + 1 == bay.max_height()) as i64;
    let key = bay.max_nwl_priority(i) as i64;
    match rule {
        RelocRule::Tlp => [height, 0, 0, 0, i as i64],
        RelocRule::Lpi => [reaches_top, key, height, 0, i as i64],
        RelocRule::MinMax => {
            if key <= p as i64 {
                let settles = !bay.accepts_well_located(i, p) as i64;
                [reaches_top, 0, -key, settles * 1_000 + height, i as i64]
            } else {
                [reaches_top, 1, key, height, i as i64]
            }
        }
    }
}

fn eligible(bay: &Bay, excluded: StackSet) -> impl Iterator<Item = usize> + '_ {
    (0..bay.width()).filter(move |&i| !excluded.contains(i) && !bay.is_full(i))
}

/// Destination for a blocking block of priority `moving`.
pub fn choose_reloc_target(
    bay: &Bay,
    moving: Priority,
    rule: RelocRule,
    excluded: StackSet,
) -> Result<usize, NoFeasibleDestination> {
    eligible(bay, excluded)
        .min_by_key(|&i| rank(bay, i, moving, rule))
        .ok_or(NoFeasibleDestination)
}

/// Temporary parking spot for a target that has to leave its own stack. A
/// stack with exactly one free slot loses nothing by holding it; otherwise the
/// stack the active rule likes least is used.
pub fn choose_temp_target_for_c(
    bay: &Bay,
    c: Priority,
    rule: RelocRule,
    excluded: StackSet,
) -> Result<usize, NoFeasibleDestination> {
    if let Some(i) = eligible(bay, excluded).find(|&i| bay.free_in(i) == 1) {
        return Ok(i);
    }
    eligible(bay, excluded)
        .max_by_key(|&i| rank(bay, i, c, rule))
        .ok_or(NoFeasibleDestination)
}

/// Largest accessible misplaced block that would sit well located on `dest`.
fn fill_candidate(bay: &Bay, dest: usize) -> Option<usize> {
    let cap = bay.top(dest)?;
    (0..bay.width())
        .filter(|&i| i != dest && !bay.is_stack_well_located(i))
        .filter(|&i| bay.top(i).is_some_and(|p| p <= cap))
        .min_by_key(|&i| (std::cmp::Reverse(bay.top(i)), i))
}

/// Whether lifting the top of `from` uncovers a larger misplaced block that
/// could be well located somewhere right away.
fn uncovers_placeable(bay: &Bay, from: usize) -> bool {
    let s = bay.stack(from);
    if s.len() < 2 {
        return false;
    }
    let (a, b) = (s[s.len() - 1], s[s.len() - 2]);
    b > a && (0..bay.width()).any(|i| i != from && bay.accepts_well_located(i, b))
}

fn standard_fill(bay: &Bay, dest: usize, stop_early: bool) -> Vec<Move> {
    let mut scratch = bay.clone();
    let mut moves = Vec::new();
    while !scratch.is_full(dest) {
        let Some(from) = fill_candidate(&scratch, dest) else {
            break;
        };
        if stop_early && uncovers_placeable(&scratch, from) {
            break;
        }
        let mv = Move::new(from, dest);
        scratch.apply(mv).expect("fill moves are legal");
        moves.push(mv);
    }
    moves
}

/// Moves that fill `dest`, which must currently be fully well located.
pub fn fill_stack(bay: &Bay, dest: usize, policy: FillPolicy) -> Vec<Move> {
    debug_assert!(bay.is_stack_well_located(dest));
    match policy {
        FillPolicy::None => Vec::new(),
        FillPolicy::Standard => standard_fill(bay, dest, false),
        FillPolicy::Stop => standard_fill(bay, dest, true),
        FillPolicy::Safe { slack } => {
            let moves = standard_fill(bay, dest, false);
            let left = bay.free_in(dest) - moves.len();
            if left <= slack {
                moves
            } else {
                Vec::new()
            }
        }
    }
}
