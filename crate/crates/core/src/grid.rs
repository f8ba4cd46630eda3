//! Odometer enumeration of product sets, partitioned into index ranges.
//!
//! Points are visited in lexicographic order of their per-axis indices (the
//! last axis turns fastest). Sweeps split the index range into contiguous
//! chunks that rayon may run on any worker; chunk results are merged in index
//! order, so any associative merge gives the same answer for every pool size.

use crate::error::{guard, Result};
use rayon::prelude::*;

/// Chunks per sweep; fixed so partitioning never depends on the thread count.
const CHUNKS: u64 = 256;
/// Grids at most this large are folded on the calling thread as one chunk.
const INLINE_LIMIT: u64 = 4096;

pub fn grid_size<T>(axes: &[Vec<T>]) -> u128 {
    axes.iter().map(|a| a.len() as u128).product()
}

/// Fails when the grid has more than `limit` points.
pub fn check_grid<T>(axes: &[Vec<T>], limit: u128) -> Result<u64> {
    let size = grid_size(axes);
    if size > limit {
        return Err(guard("grid points", size, limit));
    }
    Ok(size as u64)
}

/// Per-axis indices of the point with linear index `index`.
pub fn decode_index(radices: &[usize], mut index: u64) -> Vec<usize> {
    let mut idx = vec![0; radices.len()];
    for (slot, &r) in idx.iter_mut().zip(radices).rev() {
        *slot = (index % r as u64) as usize;
        index /= r as u64;
    }
    idx
}

/// Advances the odometer; returns false after the last point.
fn advance(idx: &mut [usize], radices: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < radices[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Folds `visit(acc, linear_index, point)` over the whole grid.
pub fn sweep<T, A, I, F, M>(axes: &[Vec<T>], identity: I, visit: F, merge: M) -> A
where
    T: Clone + Sync,
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64, &[T]) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let total = grid_size(axes) as u64;
    if total == 0 {
        return identity();
    }
    let radices: Vec<usize> = axes.iter().map(Vec::len).collect();
    let run = |start: u64, end: u64| {
        let mut acc = identity();
        let mut idx = decode_index(&radices, start);
        let mut point: Vec<T> = idx.iter().zip(axes).map(|(&i, a)| a[i].clone()).collect();
        for linear in start..end {
            visit(&mut acc, linear, &point);
            if linear + 1 < end {
                advance(&mut idx, &radices);
                for (k, (&i, a)) in idx.iter().zip(axes).enumerate() {
                    point[k] = a[i].clone();
                }
            }
        }
        acc
    };
    if total <= INLINE_LIMIT {
        return run(0, total);
    }
    let chunk = total.div_ceil(CHUNKS);
    let nchunks = total.div_ceil(chunk);
    (0..nchunks)
        .into_par_iter()
        .map(|c| run(c * chunk, ((c + 1) * chunk).min(total)))
        .reduce_with(&merge)
        .unwrap_or_else(identity)
}

/// Number of points satisfying `pred`, and the first one in odometer order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCount<T> {
    pub count: u64,
    pub first: Option<Vec<T>>,
}

pub fn count_where<T, P>(axes: &[Vec<T>], pred: P) -> GridCount<T>
where
    T: Clone + Send + Sync,
    P: Fn(&[T]) -> bool + Sync + Send,
{
    sweep(
        axes,
        || GridCount {
            count: 0,
            first: None,
        },
        |acc, _, point| {
            if pred(point) {
                acc.count += 1;
                if acc.first.is_none() {
                    acc.first = Some(point.to_vec());
                }
            }
        },
        |a, b| GridCount {
            count: a.count + b.count,
            first: a.first.or(b.first),
        },
    )
}
