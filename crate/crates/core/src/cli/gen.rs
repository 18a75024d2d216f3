//! Deterministic random instances.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::args::Distribution;
use super::io::Row;

/// Distinct coordinate values of the duplicate-heavy distribution.
pub const GRID: u32 = 8;

pub const MAX_WEIGHT: u32 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub dims: usize,
    pub data: Vec<Row>,
    pub queries: Vec<Row>,
}

/// Data ids are `0..points`, query ids follow. Coordinates lie in `[0, 1)`,
/// weights are integers in `[0, 100]`.
pub fn generate(points: usize, queries: usize, dims: usize, seed: u64, distribution: Distribution) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coord = move |rng: &mut ChaCha8Rng| match distribution {
        Distribution::Uniform => rng.gen::<f64>(),
        Distribution::Duplicates => f64::from(rng.gen_range(0..GRID)) / f64::from(GRID),
    };
    let row = |rng: &mut ChaCha8Rng, id: usize, weighted: bool| Row {
        line: id as u64 + 2,
        id: id as u64,
        coords: (0..dims).map(|_| coord(rng)).collect(),
        weight: weighted.then(|| f64::from(rng.gen_range(0..=MAX_WEIGHT))),
    };
    let data = (0..points).map(|i| row(&mut rng, i, true)).collect();
    let queries = (points..points + queries)
        .map(|i| {
            let mut r = row(&mut rng, i, false);
            r.line -= points as u64;
            r
        })
        .collect();
    Instance { dims, data, queries }
}

pub fn render_table(rows: &[Row], dims: usize, weighted: bool) -> String {
    let mut out = String::from("id");
    for i in 1..=dims {
        let _ = write!(out, ",x{i}");
    }
    if weighted {
        out.push_str(",weight");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{}", r.id);
        for x in &r.coords {
            let _ = write!(out, ",{x}");
        }
        if let (true, Some(w)) = (weighted, r.weight) {
            let _ = write!(out, ",{w}");
        }
        out.push('\n');
    }
    out
}
