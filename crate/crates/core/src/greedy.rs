//! Greedy descent on the nonassociativity count mu(Q) by flipping block
//! pairs of the multiplication table modulo a normal subloop.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::{LoopTable, SubloopMask};

#[derive(Clone, Debug, Serialize)]
pub struct GreedyStep {
    /// 1-based block-pair indices, identity coset being 1
    pub i: usize,
    pub j: usize,
    pub mu_before: u64,
    pub mu_after: u64,
}

/// One table with blocks (i,j) and (j,i) modulo the coset partition
/// multiplied by h on the right.
fn flip_blocks(
    q: &LoopTable,
    coset_of: &[usize],
    i: usize,
    j: usize,
    h: usize,
) -> Result<LoopTable> {
    let n = q.order();
    let mut flat = vec![0u16; n * n];
    for x in 0..n {
        for y in 0..n {
            let mut v = q.mul(x, y);
            let (cx, cy) = (coset_of[x], coset_of[y]);
            if (cx == i && cy == j) || (cx == j && cy == i) {
                v = q.mul(v, h);
            }
            flat[x * n + y] = v as u16;
        }
    }
    LoopTable::from_flat(n, flat)
}

/// The procedure (*): repeatedly evaluate all block-pair flips 1 < i < j,
/// take the one with minimal mu-count (lexicographically least pair on
/// ties), and stop as soon as no flip strictly decreases mu.
pub fn greedy_minimize(
    q: &LoopTable,
    n_mask: &SubloopMask,
    h: usize,
) -> Result<(LoopTable, Vec<GreedyStep>)> {
    if h == 0 || q.mul(h, h) != 0 || !q.center().contains(h) {
        return Err(Error::NotCentralInvolution);
    }
    if !n_mask.contains(h) {
        return Err(Error::BadCosetStructure("h is not in the subloop".into()));
    }
    if !n_mask.is_subloop(q) {
        return Err(Error::BadCosetStructure("subset is not a subloop".into()));
    }
    let coset_of = q
        .coset_partition(n_mask)
        .map_err(|e| Error::BadCosetStructure(e.to_string()))?;
    let nc = coset_of.iter().max().unwrap() + 1;
    let mut current = q.clone();
    let mut mu = current.mu_count();
    let mut history = Vec::new();
    loop {
        let pairs: Vec<(usize, usize)> =
            (1..nc).flat_map(|i| (i + 1..nc).map(move |j| (i, j))).collect();
        let candidates: Vec<(u64, usize, usize)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let t = flip_blocks(&current, &coset_of, i, j, h)
                    .expect("central flip preserves the loop property");
                (t.mu_count(), i, j)
            })
            .collect();
        let &(best_mu, i, j) = candidates
            .iter()
            .min()
            .ok_or_else(|| Error::BadCosetStructure("fewer than three cosets".into()))?;
        if best_mu >= mu {
            return Ok((current, history));
        }
        current = flip_blocks(&current, &coset_of, i, j, h)?;
        history.push(GreedyStep { i: i + 1, j: j + 1, mu_before: mu, mu_after: best_mu });
        mu = best_mu;
    }
}
