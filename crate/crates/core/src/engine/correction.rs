use crate::bay::Move;

/// Collapses adjacent pairs where the second move lifts the block the first
/// one just placed: `(a,b),(b,c)` becomes `(a,c)` and `(a,b),(b,a)` vanishes.
/// Runs to a fixpoint; the result replays to the same final bay.
pub fn correct(moves: &[Move]) -> Vec<Move> {
    let mut out: Vec<Move> = Vec::with_capacity(moves.len());
    for &mv in moves {
        let mut pending = Some(mv);
        while let Some(m) = pending {
            match out.last() {
                Some(&prev) if prev.to == m.from => {
                    out.pop();
                    pending = (prev.from != m.to).then(|| Move::new(prev.from, m.to));
                }
                _ => {
                    out.push(m);
                    pending = None;
                }
            }
        }
    }
    out
}
