//! Destination and block-selection scores.
//!
//! For a non-well-located block `c` sitting on stack `s` and a candidate
//! destination `d`:
//!
//! * `f(c, d)`: blocks to lift off `d` before `c` can sit on it well located.
//!   When `d == s` this counts `c` itself and everything above it, plus the
//!   blocks below `c` that have to go.
//! * `g(c)`: blocks above `c`.
//! * `w(c, d) = f + g + 1` for `d != s`, `f + 1` for `d == s`.
//! * `nw(c, d)`: how many of the `f` removed blocks are currently well located.
//! * `f̂ = f + nw` and `ŵ` is `w` with `f̂` in place of `f`.
//!
//! Block selection uses `ĥ(c) = -p(c) + ŵ(c, d) + fr(c, d)` where `d` is the
//! best destination under `ŵ` and `fr` estimates the forced relocations the
//! move creates.

use crate::bay::{Bay, Priority, StackSet};
use crate::reloc::{next_blocking_to_move, NoFeasibleDestination, RelocationPlan};

/// A non-well-located block addressed by its stack and the number of blocks above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TargetBlock {
    pub stack: usize,
    pub depth: usize,
    pub priority: Priority,
}

impl TargetBlock {
    /// The block `depth` positions below the top of `stack`.
    pub fn at(bay: &Bay, stack: usize, depth: usize) -> Self {
        let s = bay.stack(stack);
        TargetBlock {
            stack,
            depth,
            priority: s[s.len() - depth - 1],
        }
    }

    /// 0-based tier, i.e. the number of blocks below it.
    pub fn tier(&self, bay: &Bay) -> usize {
        bay.height(self.stack) - self.depth - 1
    }
}

/// Every non-well-located block, stack by stack, top first.
pub fn non_well_located_blocks(bay: &Bay) -> Vec<TargetBlock> {
    let mut out = Vec::new();
    for i in 0..bay.width() {
        for depth in 0..bay.nwl(i) {
            out.push(TargetBlock::at(bay, i, depth));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DestScore {
    W,
    WHat,
}

impl DestScore {
    pub const ALL: [DestScore; 2] = [DestScore::W, DestScore::WHat];

    pub fn label(self) -> &'static str {
        match self {
            DestScore::W => "w",
            DestScore::WHat => "what",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DestinationChoice {
    pub stack: usize,
    pub score: usize,
    /// `f` or `f̂`, depending on the score used.
    pub removals: usize,
}

/// Number of bottom blocks of `dest` that can stay when `c` is put on it.
fn kept_below(bay: &Bay, c: &TargetBlock, dest: usize) -> usize {
    let s = bay.stack(dest);
    let base = if dest == c.stack {
        c.tier(bay)
    } else {
        s.len()
    };
    let prefix = bay.well_located_prefix(dest).min(base);
    s[..prefix].iter().take_while(|&&q| q >= c.priority).count()
}

pub fn f_score(bay: &Bay, c: &TargetBlock, dest: usize) -> usize {
    bay.height(dest) - kept_below(bay, c, dest)
}

pub fn g_score(c: &TargetBlock) -> usize {
    c.depth
}

/// Whether `c` could physically end up on `dest`. A full stack that keeps all
/// of its blocks has no room left.
pub fn can_receive(bay: &Bay, c: &TargetBlock, dest: usize) -> bool {
    dest == c.stack || kept_below(bay, c, dest) < bay.max_height()
}

fn w_from(f: usize, c: &TargetBlock, dest: usize) -> usize {
    if dest == c.stack {
        f + 1
    } else {
        f + c.depth + 1
    }
}

pub fn w_score(bay: &Bay, c: &TargetBlock, dest: usize) -> usize {
    w_from(f_score(bay, c, dest), c, dest)
}

pub fn nw_score(bay: &Bay, c: &TargetBlock, dest: usize) -> usize {
    nw_from(f_score(bay, c, dest), bay.nwl(dest))
}

fn nw_from(f: usize, nwl: usize) -> usize {
    f.saturating_sub(nwl)
}

pub fn f_hat_score(bay: &Bay, c: &TargetBlock, dest: usize) -> usize {
    let f = f_score(bay, c, dest);
    f + nw_from(f, bay.nwl(dest))
}

pub fn w_hat_score(bay: &Bay, c: &TargetBlock, dest: usize) -> usize {
    w_from(f_hat_score(bay, c, dest), c, dest)
}

fn score_with(bay: &Bay, c: &TargetBlock, dest: usize, mode: DestScore) -> (usize, usize) {
    let removals = match mode {
        DestScore::W => f_score(bay, c, dest),
        DestScore::WHat => f_hat_score(bay, c, dest),
    };
    (w_from(removals, c, dest), removals)
}

/// Whether the relocations needed to well locate `c` on `dest` fit into the
/// free slots of the remaining stacks.
pub fn has_capacity(bay: &Bay, c: &TargetBlock, dest: usize) -> bool {
    if !can_receive(bay, c, dest) {
        return false;
    }
    let f = f_score(bay, c, dest);
    if dest == c.stack {
        // `c` has to be parked somewhere, which needs a third stack
        bay.width() >= 3 && bay.free_slots_outside(StackSet::EMPTY.with(dest)) >= f
    } else {
        bay.free_slots_outside(StackSet::of(&[c.stack, dest])) >= f + c.depth
    }
}

/// Destinations that cannot take `c` right now.
pub fn infeasible_destinations(bay: &Bay, c: &TargetBlock) -> StackSet {
    let mut out = StackSet::EMPTY;
    for d in 0..bay.width() {
        if !has_capacity(bay, c, d) {
            out.insert(d);
        }
    }
    out
}

/// Argmin of `w` or `ŵ` over the stacks not in `excluded`; ties go to the
/// lowest stack index.
pub fn select_destination(
    bay: &Bay,
    c: &TargetBlock,
    mode: DestScore,
    excluded: StackSet,
) -> Result<DestinationChoice, NoFeasibleDestination> {
    let mut best: Option<DestinationChoice> = None;
    for d in 0..bay.width() {
        if excluded.contains(d) || !can_receive(bay, c, d) {
            continue;
        }
        let (score, removals) = score_with(bay, c, d, mode);
        if best.is_none_or(|b| score < b.score) {
            best = Some(DestinationChoice {
                stack: d,
                score,
                removals,
            });
        }
    }
    best.ok_or(NoFeasibleDestination)
}

/// [`select_destination`] restricted to capacity-feasible stacks.
pub fn best_destination(
    bay: &Bay,
    c: &TargetBlock,
    mode: DestScore,
) -> Result<DestinationChoice, NoFeasibleDestination> {
    select_destination(bay, c, mode, infeasible_destinations(bay, c))
}

/// Tight-fit placement under the top-key approximation: the largest top key
/// not above `p`, otherwise the smallest one.
fn top_key_target(bay: &Bay, p: Priority, excluded: StackSet) -> Option<usize> {
    let eligible = (0..bay.width()).filter(|&i| !excluded.contains(i) && !bay.is_full(i));
    eligible.min_by_key(|&i| {
        let k = bay.top_key(i);
        if k <= p {
            (0, -(k as i64), i)
        } else {
            (1, k as i64, i)
        }
    })
}

/// Estimated number of forced relocations created while well locating `c`
/// on `dest`. Runs the relocation order on a private copy of the bay; a
/// relocated block counts as forced when every stack it could go to has a
/// top key above its priority.
pub fn fr_estimate(bay: &Bay, c: &TargetBlock, dest: usize) -> usize {
    let mut scratch = bay.clone();
    let mut plan = RelocationPlan::for_target(bay, c, dest);
    let blocked = StackSet::of(&[c.stack, dest]);
    let mut forced = 0;
    let mut lifted = 0;
    while let Some(side) = next_blocking_to_move(&scratch, &plan) {
        plan.take(side);
        let r = scratch.top(side).expect("plan only lifts existing blocks");
        if dest == c.stack && lifted == c.depth {
            // `c` itself: set aside, it comes straight back
            scratch.pop_unchecked(side);
            lifted += 1;
            continue;
        }
        lifted += 1;
        match top_key_target(&scratch, r, blocked) {
            Some(to) => {
                if (0..scratch.width())
                    .filter(|&i| !blocked.contains(i) && !scratch.is_full(i))
                    .all(|i| scratch.top_key(i) > r)
                {
                    forced += 1;
                }
                let b = scratch.pop_unchecked(side);
                scratch.push_unchecked(to, b);
            }
            None => {
                // one penalty for this block and each one still to be lifted
                return forced + 1 + plan.remaining();
            }
        }
    }
    forced
}

/// `ĥ(c)`, or `None` when `c` has no feasible destination.
pub fn h_hat(bay: &Bay, c: &TargetBlock) -> Option<i64> {
    let d = best_destination(bay, c, DestScore::WHat).ok()?;
    Some(-(c.priority as i64) + d.score as i64 + fr_estimate(bay, c, d.stack) as i64)
}

/// Highest-priority non-well-located block; ties go to the smaller `ŵ`, then
/// the lower stack index.
pub fn select_block_max_priority(bay: &Bay) -> Option<TargetBlock> {
    let blocks = non_well_located_blocks(bay);
    let top = blocks.iter().map(|b| b.priority).max()?;
    blocks
        .into_iter()
        .filter(|b| b.priority == top)
        .min_by_key(|b| {
            let w = best_destination(bay, b, DestScore::WHat).map_or(usize::MAX, |d| d.score);
            (w, b.stack, b.depth)
        })
}

/// Block minimizing `ĥ`. Blocks whose priority is at most `p(c_m) - n`,
/// with `c_m` the highest-priority block and `n = ŵ(c_m) + fr(c_m)`, can
/// never win and are skipped.
pub fn select_block_lookahead(bay: &Bay) -> Option<TargetBlock> {
    select_block_lookahead_with(bay, true)
}

pub fn select_block_lookahead_with(bay: &Bay, prune: bool) -> Option<TargetBlock> {
    let cm = select_block_max_priority(bay)?;
    let threshold = if prune {
        best_destination(bay, &cm, DestScore::WHat).ok().map(|d| {
            let n = d.score + fr_estimate(bay, &cm, d.stack);
            cm.priority as i64 - n as i64
        })
    } else {
        None
    };
    non_well_located_blocks(bay)
        .into_iter()
        .filter(|b| threshold.is_none_or(|t| b.priority as i64 > t))
        .filter_map(|b| h_hat(bay, &b).map(|h| (h, b)))
        .min_by_key(|&(h, b)| (h, std::cmp::Reverse(b.priority), b.stack, b.depth))
        .map(|(_, b)| b)
}
