#![allow(dead_code)]

use domscan::{Point, QueryResult, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Instance<A> = (Vec<Point<f64, A>>, Vec<Point<f64, A>>);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Data ids `0..n_data`, query ids after them. Gridded coordinates take one
/// of eight values, which forces ties in every dimension.
pub fn instance<A: Default>(
    rng: &mut ChaCha8Rng,
    n_data: usize,
    n_query: usize,
    m: usize,
    gridded: bool,
    mut weight: impl FnMut(&mut ChaCha8Rng) -> A,
) -> Instance<A> {
    let coord = |rng: &mut ChaCha8Rng| {
        if gridded {
            f64::from(rng.gen_range(0..8u32))
        } else {
            rng.gen::<f64>()
        }
    };
    let data = (0..n_data)
        .map(|i| {
            let coords = (0..m).map(|_| coord(rng)).collect();
            Point::data(i as u64, coords, weight(rng))
        })
        .collect();
    let queries = (0..n_query)
        .map(|i| Point::query((n_data + i) as u64, (0..m).map(|_| coord(rng)).collect()))
        .collect();
    (data, queries)
}

/// Same ids and values within the scalar's tolerance.
pub fn close<A: Scalar>(got: &[QueryResult<A>], want: &[QueryResult<A>]) -> bool {
    got.len() == want.len()
        && got
            .iter()
            .zip(want)
            .all(|(g, w)| g.id == w.id && A::tolerant_eq(g.value, w.value))
}
