//! Seeded instance generation.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`, consumed through
//! `next_u64` only, so a seed names the same instance on every platform.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::bay::{Bay, Move, Priority};
use crate::instance::{Instance, InstanceMeta};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("need at least 2 stacks, got {0}")]
    TooFewStacks(usize),
    #[error("initial tiers {tiers} must be below the height cap {max_height}")]
    NoFreeSpace { tiers: usize, max_height: usize },
    #[error("at most {max} stacks are supported, got {got}")]
    TooManyStacks { got: usize, max: usize },
    #[error("free slots must be between 1 and {max}, got {got}")]
    BadFreeSlots { got: usize, max: usize },
}

/// A benchmark class: `tiers` blocks on each of `width` stacks, capped at `max_height`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BayClass {
    pub tiers: usize,
    pub width: usize,
    pub max_height: usize,
}

impl BayClass {
    pub const fn new(tiers: usize, width: usize, max_height: usize) -> Self {
        BayClass {
            tiers,
            width,
            max_height,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.tiers * self.width
    }

    pub fn generate(&self, seed: u64) -> Result<Instance, GenerateError> {
        generate(self.width, self.tiers, self.max_height, seed)
    }
}

impl fmt::Display for BayClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}/H{}", self.tiers, self.width, self.max_height)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad class label {0:?}, expected T*W/H<n>")]
pub struct BadClassLabel(pub String);

impl FromStr for BayClass {
    type Err = BadClassLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadClassLabel(s.to_owned());
        let (tw, h) = s.split_once('/').ok_or_else(bad)?;
        let (t, w) = tw.split_once('*').ok_or_else(bad)?;
        let h = h.strip_prefix('H').unwrap_or(h);
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        Ok(BayClass::new(num(t)?, num(w)?, num(h)?))
    }
}

/// The 18 benchmark classes, in table order.
pub const BENCHMARK_CLASSES: [BayClass; 18] = [
    BayClass::new(3, 3, 5),
    BayClass::new(3, 4, 5),
    BayClass::new(3, 5, 5),
    BayClass::new(3, 6, 5),
    BayClass::new(3, 7, 5),
    BayClass::new(3, 8, 5),
    BayClass::new(4, 4, 6),
    BayClass::new(4, 5, 6),
    BayClass::new(4, 6, 6),
    BayClass::new(4, 7, 6),
    BayClass::new(5, 5, 7),
    BayClass::new(5, 6, 7),
    BayClass::new(5, 7, 7),
    BayClass::new(5, 8, 7),
    BayClass::new(5, 9, 7),
    BayClass::new(5, 10, 7),
    BayClass::new(6, 6, 8),
    BayClass::new(6, 10, 8),
];

/// Seeds used per class in the benchmark runs.
pub const SEEDS_PER_CLASS: u64 = 40;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `0..bound` by rejection, so no modulo bias.
pub fn below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

/// Fisher–Yates, walking from the back.
pub fn shuffle<T>(rng: &mut impl RngCore, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

fn check_width(width: usize) -> Result<(), GenerateError> {
    if width < 2 {
        return Err(GenerateError::TooFewStacks(width));
    }
    if width > crate::bay::MAX_WIDTH {
        return Err(GenerateError::TooManyStacks {
            got: width,
            max: crate::bay::MAX_WIDTH,
        });
    }
    Ok(())
}

/// A random permutation of `1..=W·T` dealt bottom-to-top, `T` blocks per stack.
pub fn generate(
    width: usize,
    tiers: usize,
    max_height: usize,
    seed: u64,
) -> Result<Instance, GenerateError> {
    check_width(width)?;
    if tiers >= max_height {
        return Err(GenerateError::NoFreeSpace { tiers, max_height });
    }
    let n = width * tiers;
    let mut prios: Vec<Priority> = (1..=n as Priority).collect();
    shuffle(&mut rng(seed), &mut prios);
    let stacks = if tiers == 0 {
        vec![Vec::new(); width]
    } else {
        prios.chunks(tiers).map(<[Priority]>::to_vec).collect()
    };
    let bay = Bay::new(max_height, stacks).expect("generated bay is valid");
    let class = BayClass::new(tiers, width, max_height);
    Ok(Instance {
        name: format!("{}-{}", class.to_string().replace(['*', '/'], "-"), seed),
        bay,
        meta: InstanceMeta {
            class: Some(class),
            seed: Some(seed),
        },
    })
}

/// A bay with exactly `free` empty slots that is known to be solvable.
///
/// Starts from a random fully well-located layout and applies `walk` random
/// legal moves, so reversing the walk is always a solution.
pub fn near_full(
    width: usize,
    max_height: usize,
    free: usize,
    walk: usize,
    seed: u64,
) -> Result<Bay, GenerateError> {
    check_width(width)?;
    let cap = width * max_height;
    if free == 0 || free >= cap {
        return Err(GenerateError::BadFreeSlots {
            got: free,
            max: cap - 1,
        });
    }
    let n = cap - free;
    let mut rng = rng(seed);
    let mut heights = vec![max_height; width];
    for _ in 0..free {
        let mut i = below(&mut rng, width as u64) as usize;
        while heights[i] == 0 {
            i = (i + 1) % width;
        }
        heights[i] -= 1;
    }
    let mut prios: Vec<Priority> = (1..=n as Priority).collect();
    shuffle(&mut rng, &mut prios);
    let mut rest = &prios[..];
    let mut stacks = Vec::with_capacity(width);
    for h in heights {
        let (mine, tail) = rest.split_at(h);
        rest = tail;
        let mut s = mine.to_vec();
        s.sort_unstable_by(|a, b| b.cmp(a));
        stacks.push(s);
    }
    let mut bay = Bay::new(max_height, stacks).expect("generated bay is valid");
    for _ in 0..walk {
        let mv = loop {
            let from = below(&mut rng, width as u64) as usize;
            let to = below(&mut rng, width as u64) as usize;
            let mv = Move::new(from, to);
            if bay.check_move(mv).is_ok() {
                break mv;
            }
        };
        bay.apply(mv).expect("checked");
    }
    Ok(bay)
}
