//! Per-dimension transfer of real coordinates to binary ranks, expressed
//! through the sequence primitives only.
//!
//! Equal coordinates receive equal ranks, so strict inequalities between
//! coordinates are exactly the strict inequalities between ranks.

use std::cmp::Ordering;

use crate::bits::{bin, rank_width, BitString};
use crate::error::{Error, Result};
use crate::monoid::{Count, Sum};
use crate::pipeline::Point;
use crate::primitives::Engine;
use crate::scalar::{cmp_coord, Coord};
use crate::seq::Seq;

/// `1` when `a < b`, else `0`.
fn less<C: Coord>(a: &C, b: &C) -> u64 {
    u64::from(a < b)
}

/// Ranks of an ascending coordinate sequence and the distinct-value count
/// broadcast to every position.
///
/// Shifting right and comparing each element with its predecessor marks
/// the first occurrence of every distinct value; the prefix sum of the
/// marks is the 1-based rank, and its maximum the distinct count.
pub(crate) fn sorted_ranks<C: Coord>(engine: &Engine, sorted: &Seq<C>) -> Result<(Seq<u64>, Seq<u64>)> {
    engine.begin_instruction();
    let shifted = engine.shift(sorted, C::neg_infinity());
    engine.begin_instruction();
    let marks = engine.mzip(&shifted, sorted, less)?;
    let ranks = engine.scan(&marks, &Sum::<u64>::new());
    engine.begin_instruction();
    let unique = engine.bm(&ranks, 0);
    Ok((ranks, unique))
}

/// Sorts `records` by coordinate `dim` and attaches each record's binary
/// rank in that dimension.
///
/// Records travel with their ranks, so no re-alignment to the input order
/// is needed before the next dimension. Returns the attached records (in
/// ascending coordinate order), the distinct count and the rank width.
pub(crate) fn rank_and_attach<R, C, K, I, F>(
    engine: &Engine,
    records: &Seq<R>,
    coord: K,
    id: I,
    attach: F,
) -> Result<(Seq<R>, u64, u32)>
where
    R: Clone + Send + Sync,
    C: Coord,
    K: Fn(&R) -> C + Sync + Send,
    I: Fn(&R) -> u64 + Sync + Send,
    F: Fn(&R, BitString) -> R + Sync + Send,
{
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    engine.begin_instruction();
    let sorted = engine.sort_by(records, |a, b| {
        cmp_coord(&coord(a), &coord(b)).then_with(|| id(a).cmp(&id(b)))
    });
    engine.begin_instruction();
    let coords = engine.map(&sorted, &coord);
    let (ranks, unique) = sorted_ranks(engine, &coords)?;
    let u = unique[0];
    let width = rank_width(u);
    engine.begin_instruction();
    let attached = engine.mzip3(&sorted, &ranks, &unique, |rec, &r, &u| {
        attach(rec, bin(r - 1, rank_width(u)).expect("rank fits its width"))
    })?;
    Ok((attached, u, width))
}

/// 1-based ranks of coordinate `dim` (0-based index) aligned with `dq`, and
/// the number of distinct values.
pub fn rank_dimension<C: Coord, A: Clone + Send + Sync>(
    engine: &Engine,
    dq: &Seq<Point<C, A>>,
    dim: usize,
) -> Result<(Seq<u64>, u64)> {
    if dq.is_empty() {
        return Err(Error::EmptyInput);
    }
    for p in dq {
        if dim >= p.coords.len() {
            return Err(Error::DimensionOutOfRange {
                index: dim,
                dims: p.coords.len(),
            });
        }
        if !p.coords[dim].is_finite() {
            return Err(Error::NonFiniteCoordinate { id: p.id });
        }
    }
    let positions = engine.scan(&engine.map(dq, |_| 1u64), &Count);
    let keyed = engine.mzip(dq, &positions, |p, &k| (p.coords[dim], k))?;
    let sorted = engine.sort_by(&keyed, |a, b| {
        cmp_coord(&a.0, &b.0).then(a.1.cmp(&b.1))
    });
    let coords = engine.map(&sorted, |t| t.0);
    let (ranks, unique) = sorted_ranks(engine, &coords)?;
    let by_position = engine.sort_by(
        &engine.mzip(&sorted, &ranks, |t, &r| (t.1, r))?,
        |a: &(u64, u64), b: &(u64, u64)| a.0.cmp(&b.0),
    );
    Ok((engine.map(&by_position, |t| t.1), unique[0]))
}

/// Encodes each rank `r` as `bin(r - 1, max(1, ⌈log₂ unique⌉))`.
pub fn binarize(engine: &Engine, ranks: &Seq<u64>, unique: u64) -> Result<Seq<BitString>> {
    if let Some(&rank) = ranks.iter().find(|&&r| r == 0 || r > unique) {
        return Err(Error::RankOutOfRange { rank, unique });
    }
    let width = rank_width(unique);
    Ok(engine.map(ranks, |&r| bin(r - 1, width).expect("rank checked against unique")))
}

/// Compares binarized ranks; only meaningful for equal widths.
pub fn compare_ranks(a: &BitString, b: &BitString) -> Ordering {
    debug_assert_eq!(a.width(), b.width());
    a.cmp(b)
}
