//! Brute-force reference implementations. Nothing here touches the
//! primitives engine, so the checks stay independent of it.

use crate::monoid::Monoid;
use crate::pipeline::{Point, QueryResult};
use crate::scalar::Coord;

/// Per-query aggregates, ascending by query id.
pub type OracleResult<A> = Vec<QueryResult<A>>;

/// `true` when `d` is strictly smaller than `q` in every coordinate.
pub fn dominated<C: Coord>(d: &[C], q: &[C]) -> bool {
    d.len() == q.len() && d.iter().zip(q).all(|(a, b)| a < b)
}

/// Folds the weights of all data points strictly dominated by each query,
/// in ascending data-id order.
pub fn brute_force<C, M>(data: &[Point<C, M::Value>], queries: &[Point<C, M::Value>], monoid: &M) -> OracleResult<M::Value>
where
    C: Coord,
    M: Monoid,
{
    let mut data: Vec<&Point<C, M::Value>> = data.iter().collect();
    data.sort_by_key(|d| d.id);
    let mut out: Vec<QueryResult<M::Value>> = queries
        .iter()
        .map(|q| {
            let value = data
                .iter()
                .filter(|d| dominated(&d.coords, &q.coords))
                .fold(monoid.unit(), |acc, d| monoid.combine(&acc, &d.weight));
            QueryResult { id: q.id, value }
        })
        .collect();
    out.sort_by_key(|r| r.id);
    out
}

/// Rank of each value: one plus the number of distinct smaller values.
pub fn brute_force_ranks<C: Coord>(values: &[C]) -> Vec<u64> {
    values
        .iter()
        .map(|v| {
            let mut smaller: Vec<&C> = values.iter().filter(|w| *w < v).collect();
            smaller.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            smaller.dedup();
            smaller.len() as u64 + 1
        })
        .collect()
}
