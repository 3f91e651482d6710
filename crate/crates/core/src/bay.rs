//! Bay state, move legality and the well-located predicates.
//!
//! Stacks are stored bottom-to-top. A block is well located when every block
//! below it has a priority greater than or equal to its own, so a stack is
//! fully well located iff it is non-increasing when read bottom-to-top.

use std::fmt;

use thiserror::Error;

/// Retrieval order key. Smaller values must leave the bay earlier.
pub type Priority = u32;

/// Upper bound on the number of stacks, so stack sets fit in a `u64` mask.
pub const MAX_WIDTH: usize = 64;

/// One relocation: lift the top of `from`, drop it on `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub from: usize,
    pub to: usize,
}

impl Move {
    pub fn new(from: usize, to: usize) -> Self {
        Move { from, to }
    }

    pub fn reversed(self) -> Self {
        Move {
            from: self.to,
            to: self.from,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.from, self.to)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IllegalReason {
    SameStack,
    OutOfRange,
    EmptySource,
    FullDestination,
}

impl fmt::Display for IllegalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IllegalReason::SameStack => "source equals destination",
            IllegalReason::OutOfRange => "stack index out of range",
            IllegalReason::EmptySource => "source stack is empty",
            IllegalReason::FullDestination => "destination stack is full",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BayError {
    #[error("illegal move {mv}: {reason}")]
    IllegalMove { mv: Move, reason: IllegalReason },
    #[error("invalid bay: {0}")]
    Invalid(String),
}

/// A set of stack indices backed by a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct StackSet(u64);

impl StackSet {
    pub const EMPTY: StackSet = StackSet(0);

    pub fn of(indices: &[usize]) -> Self {
        let mut set = StackSet::EMPTY;
        for &i in indices {
            set.insert(i);
        }
        set
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn with(mut self, i: usize) -> Self {
        self.insert(i);
        self
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn union(self, other: StackSet) -> Self {
        StackSet(self.0 | other.0)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }
}

/// The stacking area: `width` stacks, each at most `max_height` tiers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bay {
    max_height: usize,
    stacks: Vec<Vec<Priority>>,
}

impl Bay {
    pub fn new(max_height: usize, stacks: Vec<Vec<Priority>>) -> Result<Self, BayError> {
        if stacks.len() < 2 {
            return Err(BayError::Invalid(format!(
                "a bay needs at least 2 stacks, got {}",
                stacks.len()
            )));
        }
        if stacks.len() > MAX_WIDTH {
            return Err(BayError::Invalid(format!(
                "at most {MAX_WIDTH} stacks are supported, got {}",
                stacks.len()
            )));
        }
        if max_height == 0 {
            return Err(BayError::Invalid("max height must be at least 1".into()));
        }
        for (i, s) in stacks.iter().enumerate() {
            if s.len() > max_height {
                return Err(BayError::Invalid(format!(
                    "stack {i} holds {} blocks but the height cap is {max_height}",
                    s.len()
                )));
            }
            if s.contains(&0) {
                return Err(BayError::Invalid(format!("stack {i} holds priority 0")));
            }
        }
        Ok(Bay { max_height, stacks })
    }

    /// A bay of `width` empty stacks.
    pub fn empty(width: usize, max_height: usize) -> Result<Self, BayError> {
        Bay::new(max_height, vec![Vec::new(); width])
    }

    pub fn width(&self) -> usize {
        self.stacks.len()
    }

    pub fn max_height(&self) -> usize {
        self.max_height
    }

    pub fn stacks(&self) -> &[Vec<Priority>] {
        &self.stacks
    }

    pub fn stack(&self, i: usize) -> &[Priority] {
        &self.stacks[i]
    }

    pub fn height(&self, i: usize) -> usize {
        self.stacks[i].len()
    }

    pub fn is_full(&self, i: usize) -> bool {
        self.stacks[i].len() >= self.max_height
    }

    pub fn free_in(&self, i: usize) -> usize {
        self.max_height - self.stacks[i].len()
    }

    pub fn top(&self, i: usize) -> Option<Priority> {
        self.stacks[i].last().copied()
    }

    pub fn num_blocks(&self) -> usize {
        self.stacks.iter().map(Vec::len).sum()
    }

    pub fn capacity(&self) -> usize {
        self.width() * self.max_height
    }

    pub fn free_slots(&self) -> usize {
        self.capacity() - self.num_blocks()
    }

    /// Free slots over all stacks not in `excluded`.
    pub fn free_slots_outside(&self, excluded: StackSet) -> usize {
        (0..self.width())
            .filter(|&i| !excluded.contains(i))
            .map(|i| self.free_in(i))
            .sum()
    }

    /// Length of the maximal bottom-up run in which each block is no larger
    /// than the one directly below it.
    pub fn well_located_prefix(&self, i: usize) -> usize {
        prefix_len(&self.stacks[i])
    }

    /// Number of non-well-located blocks in stack `i`.
    pub fn nwl(&self, i: usize) -> usize {
        self.height(i) - self.well_located_prefix(i)
    }

    /// Total number of non-well-located blocks in the bay.
    pub fn nwl_total(&self) -> usize {
        (0..self.width()).map(|i| self.nwl(i)).sum()
    }

    pub fn is_stack_well_located(&self, i: usize) -> bool {
        self.nwl(i) == 0
    }

    pub fn all_well_located(&self) -> bool {
        (0..self.width()).all(|i| self.is_stack_well_located(i))
    }

    /// Priority of the top block, or 0 for an empty or fully well-located stack.
    pub fn top_key(&self, i: usize) -> Priority {
        if self.is_stack_well_located(i) {
            0
        } else {
            self.top(i).unwrap_or(0)
        }
    }

    /// Highest priority among the non-well-located blocks of stack `i`, 0 if none.
    pub fn max_nwl_priority(&self, i: usize) -> Priority {
        let s = &self.stacks[i];
        s[prefix_len(s)..].iter().copied().max().unwrap_or(0)
    }

    /// Whether a block of priority `p` would be well located if dropped on `i` now.
    pub fn accepts_well_located(&self, i: usize, p: Priority) -> bool {
        !self.is_full(i) && self.is_stack_well_located(i) && self.top(i).is_none_or(|t| t >= p)
    }

    pub fn check_move(&self, mv: Move) -> Result<(), BayError> {
        let illegal = |reason| Err(BayError::IllegalMove { mv, reason });
        if mv.from >= self.width() || mv.to >= self.width() {
            return illegal(IllegalReason::OutOfRange);
        }
        if mv.from == mv.to {
            return illegal(IllegalReason::SameStack);
        }
        if self.stacks[mv.from].is_empty() {
            return illegal(IllegalReason::EmptySource);
        }
        if self.is_full(mv.to) {
            return illegal(IllegalReason::FullDestination);
        }
        Ok(())
    }

    /// Pop the top of `mv.from` and push it on `mv.to`.
    pub fn apply(&mut self, mv: Move) -> Result<Priority, BayError> {
        self.check_move(mv)?;
        let p = self.stacks[mv.from].pop().expect("checked non-empty");
        self.stacks[mv.to].push(p);
        Ok(p)
    }

    /// Reverts a previously applied `mv`.
    pub fn undo(&mut self, mv: Move) -> Result<Priority, BayError> {
        self.check_move(mv.reversed()).map_err(|e| match e {
            BayError::IllegalMove { reason, .. } => BayError::IllegalMove { mv, reason },
            other => other,
        })?;
        let p = self.stacks[mv.to].pop().expect("checked non-empty");
        self.stacks[mv.from].push(p);
        Ok(p)
    }

    pub fn with_move(&self, mv: Move) -> Result<Bay, BayError> {
        let mut next = self.clone();
        next.apply(mv)?;
        Ok(next)
    }

    pub fn without_move(&self, mv: Move) -> Result<Bay, BayError> {
        let mut prev = self.clone();
        prev.undo(mv)?;
        Ok(prev)
    }

    /// Replays `moves` in order, stopping at the first illegal one.
    pub fn replay(&self, moves: &[Move]) -> Result<Bay, (usize, BayError)> {
        let mut bay = self.clone();
        for (i, &mv) in moves.iter().enumerate() {
            bay.apply(mv).map_err(|e| (i, e))?;
        }
        Ok(bay)
    }

    pub(crate) fn pop_unchecked(&mut self, i: usize) -> Priority {
        self.stacks[i].pop().expect("pop from empty stack")
    }

    pub(crate) fn push_unchecked(&mut self, i: usize, p: Priority) {
        self.stacks[i].push(p);
    }

    /// Sorted multiset of all priorities in the bay.
    pub fn priority_multiset(&self) -> Vec<Priority> {
        let mut all: Vec<Priority> = self.stacks.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}

impl fmt::Display for Bay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for tier in (0..self.max_height).rev() {
            for (i, s) in self.stacks.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                match s.get(tier) {
                    Some(p) => write!(f, "{p:>3}")?,
                    None => f.write_str("  .")?,
                }
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

fn prefix_len(s: &[Priority]) -> usize {
    if s.is_empty() {
        return 0;
    }
    let mut n = 1;
    while n < s.len() && s[n] <= s[n - 1] {
        n += 1;
    }
    n
}
