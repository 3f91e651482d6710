use thiserror::Error;

use crate::bay::{Bay, BayError};
use crate::engine::Solution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("move #{index} is illegal: {source}")]
    IllegalMove { index: usize, source: BayError },
    #[error("final bay still has {misplaced} misplaced blocks")]
    NotWellLocated { misplaced: usize },
}

/// Replays `sol` on `initial` and returns the final bay if every move is
/// legal and every block ends up well located.
pub fn verify(initial: &Bay, sol: &Solution) -> Result<Bay, VerifyError> {
    let end = initial
        .replay(&sol.moves)
        .map_err(|(index, source)| VerifyError::IllegalMove { index, source })?;
    if !end.all_well_located() {
        return Err(VerifyError::NotWellLocated {
            misplaced: end.nwl_total(),
        });
    }
    Ok(end)
}

pub fn is_valid(initial: &Bay, sol: &Solution) -> bool {
    verify(initial, sol).is_ok()
}
