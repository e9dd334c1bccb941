//! Exhaustive reference solver over all `2^M` activations.

use rayon::prelude::*;

use super::{ActivationVector, GainTable, SharingInstance, SharingSolution};
use crate::error::{Error, Result};
use crate::num::Real;

pub const MAX_EXHAUSTIVE_LINKS: usize = 20;

#[derive(Clone, Copy)]
struct Best<T> {
    mask: u64,
    objective: T,
}

/// Bit-string order of `y_1 .. y_M`, where link `j` lives in bit `j` of the
/// mask. Reversing the low `m` bits turns it into plain integer order.
fn lex_key(mask: u64, m: usize) -> u64 {
    if m == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - m)
    }
}

fn better<T: Real>(a: Best<T>, b: Best<T>, m: usize) -> Best<T> {
    if b.objective > a.objective
        || (b.objective == a.objective && lex_key(b.mask, m) < lex_key(a.mask, m))
    {
        b
    } else {
        a
    }
}

/// Best feasible activation by full enumeration.
///
/// Ties on the objective go to the lexicographically smallest bit string.
/// If nothing is feasible the all-zeros vector is returned flagged
/// infeasible. The reduction is associative and commutative, so the parallel
/// enumeration is deterministic.
pub fn brute_force_optimum<T: Real>(instance: &SharingInstance<T>) -> Result<SharingSolution<T>> {
    let m = instance.secondary_count();
    if m > MAX_EXHAUSTIVE_LINKS {
        return Err(Error::TooManyLinks {
            got: m,
            max: MAX_EXHAUSTIVE_LINKS,
        });
    }
    instance.validate()?;
    let table = GainTable::new(instance);
    let total = 1u64 << m;

    let eval = |mask: u64| -> Option<Best<T>> {
        let bits: Vec<bool> = (0..m).map(|j| (mask >> j) & 1 == 1).collect();
        let (objective, violations) = table.score(&bits);
        (violations == 0).then_some(Best { mask, objective })
    };
    let pick = |a: Option<Best<T>>, b: Option<Best<T>>| match (a, b) {
        (Some(a), Some(b)) => Some(better(a, b, m)),
        (x, None) | (None, x) => x,
    };

    let best = if m <= 10 {
        (0..total).map(eval).fold(None, pick)
    } else {
        (0..total).into_par_iter().map(eval).reduce(|| None, pick)
    };

    let mask = best.map_or(0, |b| b.mask);
    Ok(SharingSolution::from_activation(
        &table,
        ActivationVector::from_mask(mask, m),
    ))
}
