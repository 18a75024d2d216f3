//! Aggregation over dominated points, composed from sequence primitives.
//!
//! For data points `D` with weights in a commutative monoid and queries `Q`,
//! every query `q` receives the combination of the weights of all `d ∈ D`
//! strictly smaller than `q` in every coordinate.
//!
//! The basic variant moves every coordinate to rank space, expands each point
//! into the product of its prefix sets, sorts the expansion so that matching
//! data and query tuples become adjacent, and then aggregates with segmented
//! scans: first over equal tuples, then over equal query ids. The improved
//! variant keeps the last coordinate real and lets the sort order inside each
//! segment do the work of the last dimension, which saves one logarithmic
//! factor of expansion.
//!
//! Every step is a fixed number of primitive calls, so the number of calls
//! depends on the dimension only.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bits::{expand, BitString, Parts, PrefixTuple, Role};
use crate::error::{Error, Result};
use crate::monoid::{Count, GrowthOrder, Monoid};
use crate::primitives::{Backend, Engine, DEFAULT_MIN_CHUNK};
use crate::rank_space::rank_and_attach;
use crate::scalar::{cmp_coord, Coord};
use crate::seq::Seq;

/// Instructions the pipeline runs beyond the `6m + 9` numbered algorithm
/// steps: forming the union of data and queries, indexing the sorted
/// expansion, adding one anchor per query, and projecting the results.
pub const PLUMBING_INSTRUCTIONS: u64 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Point<C, A> {
    pub id: u64,
    pub role: Role,
    pub coords: Vec<C>,
    pub weight: A,
}

impl<C, A> Point<C, A> {
    pub fn data(id: u64, coords: Vec<C>, weight: A) -> Self {
        Point {
            id,
            role: Role::Data,
            coords,
            weight,
        }
    }

    /// A query. Its stored weight is ignored; queries always weigh the unit.
    pub fn query(id: u64, coords: Vec<C>) -> Self
    where
        A: Default,
    {
        Point {
            id,
            role: Role::Query,
            coords,
            weight: A::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Basic,
    Improved,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Basic => "basic",
            Variant::Improved => "improved",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastPath {
    /// Use the fast path whenever the monoid and the weights allow it.
    Auto,
    /// Require the fast path; fails when unavailable.
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub dims: usize,
    pub variant: Variant,
    pub fast_path: FastPath,
    pub backend: Backend,
    /// Smallest chunk handed to one parallel task.
    pub min_chunk: usize,
}

impl PipelineConfig {
    pub fn new(dims: usize) -> Self {
        PipelineConfig {
            dims,
            variant: Variant::Basic,
            fast_path: FastPath::Off,
            backend: Backend::Sequential,
            min_chunk: DEFAULT_MIN_CHUNK,
        }
    }

    pub fn variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn fast_path(mut self, fast_path: FastPath) -> Self {
        self.fast_path = fast_path;
        self
    }

    pub fn backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn min_chunk(mut self, min_chunk: usize) -> Self {
        self.min_chunk = min_chunk;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult<A> {
    pub id: u64,
    pub value: A,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExpansionStats {
    pub data_points: usize,
    pub query_points: usize,
    /// Length of the prefix expansion.
    pub expanded: usize,
    /// Rank width of each binarized dimension.
    pub widths: Vec<u32>,
    pub elements_processed: u64,
    pub primitive_calls: u64,
    pub instructions: u64,
    pub fast_path: bool,
}

impl ExpansionStats {
    /// `(|D| + |Q|) · ∏ widths`, the most the expansion can produce.
    pub fn expansion_bound(&self) -> u128 {
        let n = (self.data_points + self.query_points) as u128;
        self.widths.iter().fold(n, |acc, &w| acc * u128::from(w))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTiming {
    pub phase: &'static str,
    #[serde(rename = "millis", serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput<A> {
    /// One entry per query, ascending by id.
    pub results: Vec<QueryResult<A>>,
    pub stats: ExpansionStats,
    pub phases: Vec<PhaseTiming>,
}

/// Access to the role and weight of the records flowing through a pipeline.
pub trait Weighted<A> {
    fn role(&self) -> Role;
    fn weight(&self) -> &A;
}

impl<C, A> Weighted<A> for Point<C, A> {
    fn role(&self) -> Role {
        self.role
    }
    fn weight(&self) -> &A {
        &self.weight
    }
}

impl<A> Weighted<A> for PrefixTuple<A> {
    fn role(&self) -> Role {
        self.role
    }
    fn weight(&self) -> &A {
        &self.weight
    }
}

/// The weight of each data record and the unit for each query.
pub fn weights_with_unit<T, M>(engine: &Engine, records: &Seq<T>, monoid: &M) -> Seq<M::Value>
where
    T: Weighted<M::Value> + Sync,
    M: Monoid,
{
    engine.map(records, |r| match r.role() {
        Role::Data => r.weight().clone(),
        Role::Query => monoid.unit(),
    })
}

/// The unit when `prev` is `cur`, otherwise `a`. `None` stands for "no
/// predecessor" and differs from every id.
pub fn neutral_if_eq<M: Monoid>(monoid: &M, prev: Option<u64>, cur: u64, a: M::Value) -> M::Value {
    if prev == Some(cur) {
        monoid.unit()
    } else {
        a
    }
}

#[derive(Debug, Clone)]
struct Record<C, A> {
    id: u64,
    role: Role,
    coords: Arc<[C]>,
    weight: A,
    bits: Parts,
}

#[derive(Debug, Clone)]
struct Expanded<C, A> {
    prefix: PrefixTuple<A>,
    /// The unranked last coordinate (improved variant only).
    tail: Option<C>,
}

impl<C, A> Weighted<A> for Expanded<C, A> {
    fn role(&self) -> Role {
        self.prefix.role
    }
    fn weight(&self) -> &A {
        &self.prefix.weight
    }
}

/// A partial aggregate travelling with the identity of its origin.
#[derive(Debug, Clone)]
struct Partial<A> {
    id: u64,
    /// Marks the single per-query entry used for projection.
    anchor: bool,
    /// Position in the sorted expansion; anchors use 0.
    order: u64,
    value: A,
}

fn basic_order<C: Coord, A>(a: &Expanded<C, A>, b: &Expanded<C, A>) -> Ordering {
    a.prefix
        .parts
        .cmp(&b.prefix.parts)
        .then(a.prefix.role.cmp(&b.prefix.role))
        .then(a.prefix.id.cmp(&b.prefix.id))
}

// queries precede data when every coordinate ties
fn improved_order<C: Coord, A>(a: &Expanded<C, A>, b: &Expanded<C, A>) -> Ordering {
    let tail = match (&a.tail, &b.tail) {
        (Some(x), Some(y)) => cmp_coord(x, y),
        _ => Ordering::Equal,
    };
    a.prefix
        .parts
        .cmp(&b.prefix.parts)
        .then(tail)
        .then(b.prefix.role.cmp(&a.prefix.role))
        .then(a.prefix.id.cmp(&b.prefix.id))
}

fn validate<C: Coord, A>(data: &[Point<C, A>], queries: &[Point<C, A>], dims: usize) -> Result<()> {
    if dims == 0 {
        return Err(Error::ZeroDimensions);
    }
    let mut seen = HashSet::with_capacity(data.len() + queries.len());
    for (points, role) in [(data, Role::Data), (queries, Role::Query)] {
        for p in points {
            if p.role != role {
                return Err(Error::RoleMismatch { id: p.id });
            }
            if p.coords.len() != dims {
                return Err(Error::CoordinateArity {
                    id: p.id,
                    expected: dims,
                    found: p.coords.len(),
                });
            }
            if p.coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFiniteCoordinate { id: p.id });
            }
            if !seen.insert(p.id) {
                return Err(Error::DuplicateId(p.id));
            }
        }
    }
    Ok(())
}

fn resolve_fast_path<C, M: Monoid>(
    monoid: &M,
    data: &[Point<C, M::Value>],
    mode: FastPath,
) -> Result<Option<GrowthOrder<M::Value>>> {
    if mode == FastPath::Off {
        return Ok(None);
    }
    let usable = monoid
        .growth_order()
        .filter(|g| data.iter().all(|d| (g.admits)(&d.weight)));
    match (mode, usable) {
        (FastPath::On, None) => Err(Error::FastPathUnavailable),
        (_, usable) => Ok(usable),
    }
}

/// Segmented scan of the partial values with query ids as tags.
fn rescan_by_id<M: Monoid>(engine: &Engine, parts: &Seq<Partial<M::Value>>, monoid: &M) -> Result<Seq<Partial<M::Value>>> {
    let values = engine.map(parts, |p| p.value.clone());
    let scanned = engine.segmented_scan_by(&values, parts, |a, b| a.id == b.id, monoid)?;
    engine.mzip(parts, &scanned, |p, v| Partial {
        value: v.clone(),
        ..p.clone()
    })
}

struct Phases {
    done: Vec<PhaseTiming>,
    current: Option<(&'static str, Instant)>,
}

impl Phases {
    fn new() -> Self {
        Phases {
            done: Vec::new(),
            current: None,
        }
    }

    fn start(&mut self, phase: &'static str) {
        self.finish();
        self.current = Some((phase, Instant::now()));
    }

    fn finish(&mut self) {
        if let Some((phase, t)) = self.current.take() {
            self.done.push(PhaseTiming {
                phase,
                elapsed: t.elapsed(),
            });
        }
    }
}

/// Runs the variant selected in `cfg`.
pub fn run<C, M>(
    data: &[Point<C, M::Value>],
    queries: &[Point<C, M::Value>],
    monoid: &M,
    cfg: &PipelineConfig,
) -> Result<RunOutput<M::Value>>
where
    C: Coord,
    M: Monoid,
{
    validate(data, queries, cfg.dims)?;
    let growth = resolve_fast_path(monoid, data, cfg.fast_path)?;
    let engine = Engine::new(cfg.backend).with_min_chunk(cfg.min_chunk);
    execute(&engine, data, queries, monoid, cfg, growth)
}

/// Runs the basic variant: all coordinates in rank space.
pub fn run_basic<C, M>(
    data: &[Point<C, M::Value>],
    queries: &[Point<C, M::Value>],
    monoid: &M,
    cfg: &PipelineConfig,
) -> Result<RunOutput<M::Value>>
where
    C: Coord,
    M: Monoid,
{
    if cfg.variant != Variant::Basic {
        return Err(Error::VariantMismatch {
            configured: cfg.variant.name(),
            invoked: Variant::Basic.name(),
        });
    }
    run(data, queries, monoid, cfg)
}

/// Runs the improved variant: the last coordinate stays real.
pub fn run_improved<C, M>(
    data: &[Point<C, M::Value>],
    queries: &[Point<C, M::Value>],
    monoid: &M,
    cfg: &PipelineConfig,
) -> Result<RunOutput<M::Value>>
where
    C: Coord,
    M: Monoid,
{
    if cfg.variant != Variant::Improved {
        return Err(Error::VariantMismatch {
            configured: cfg.variant.name(),
            invoked: Variant::Improved.name(),
        });
    }
    run(data, queries, monoid, cfg)
}

fn execute<C, M>(
    engine: &Engine,
    data: &[Point<C, M::Value>],
    queries: &[Point<C, M::Value>],
    monoid: &M,
    cfg: &PipelineConfig,
    growth: Option<GrowthOrder<M::Value>>,
) -> Result<RunOutput<M::Value>>
where
    C: Coord,
    M: Monoid,
{
    let mut stats = ExpansionStats {
        data_points: data.len(),
        query_points: queries.len(),
        fast_path: growth.is_some(),
        ..ExpansionStats::default()
    };
    if data.is_empty() && queries.is_empty() {
        return Ok(RunOutput {
            results: Vec::new(),
            stats,
            phases: Vec::new(),
        });
    }
    let improved = cfg.variant == Variant::Improved;
    let ranked_dims = if improved { cfg.dims - 1 } else { cfg.dims };
    let tail_dim = improved.then_some(cfg.dims - 1);
    let mut phases = Phases::new();

    phases.start("rank");
    let records = |points: &[Point<C, M::Value>], unit: bool| -> Seq<Record<C, M::Value>> {
        points
            .iter()
            .map(|p| Record {
                id: p.id,
                role: p.role,
                coords: Arc::from(p.coords.as_slice()),
                weight: if unit { monoid.unit() } else { p.weight.clone() },
                bits: Parts::new(),
            })
            .collect()
    };
    engine.begin_instruction();
    let mut dq = engine.concat(&records(data, false), &records(queries, true));
    for dim in 0..ranked_dims {
        let (next, _, width) = rank_and_attach(
            engine,
            &dq,
            |r: &Record<C, M::Value>| r.coords[dim],
            |r| r.id,
            |r, b: BitString| {
                let mut r = r.clone();
                r.bits.push(b);
                r
            },
        )?;
        dq = next;
        stats.widths.push(width);
    }

    phases.start("expand");
    engine.begin_instruction();
    let edq = engine.flatmap(&dq, |r| {
        expand(&r.bits, r.role, r.id, r.weight.clone())
            .into_iter()
            .map(|prefix| Expanded {
                prefix,
                tail: tail_dim.map(|k| r.coords[k]),
            })
            .collect::<Vec<_>>()
    });
    stats.expanded = edq.len();

    phases.start("sort");
    engine.begin_instruction();
    let sedq = if improved {
        engine.sort_by(&edq, improved_order)
    } else {
        engine.sort_by(&edq, basic_order)
    };

    phases.start("aggregate");
    engine.begin_instruction();
    let order = engine.scan(&engine.map(&sedq, |_| 1u64), &Count);
    engine.begin_instruction();
    let weights = weights_with_unit(engine, &sedq, monoid);
    let per_tuple = engine.segmented_scan_by(
        &weights,
        &sedq,
        |a, b| a.prefix.parts == b.prefix.parts,
        monoid,
    )?;
    let partials = engine.mzip3(&sedq, &per_tuple, &order, |e, v, &k| Partial {
        id: e.prefix.id,
        anchor: false,
        order: k,
        value: v.clone(),
    })?;
    // every query gets one unit-valued entry, so queries without any
    // prefix tuple still reach the projection
    engine.begin_instruction();
    let anchors = engine.flatmap(&dq, |r| {
        (r.role == Role::Query).then(|| Partial {
            id: r.id,
            anchor: true,
            order: 0,
            value: monoid.unit(),
        })
    });
    let partials = engine.concat(&partials, &anchors);
    engine.begin_instruction();
    let by_id_desc = engine.sort_by(&partials, |a, b| b.id.cmp(&a.id).then(a.order.cmp(&b.order)));
    engine.begin_instruction();
    let totals = rescan_by_id(engine, &by_id_desc, monoid)?;

    // each id segment now ends with its complete aggregate
    phases.start("distribute");
    let distributed = match growth {
        Some(g) => {
            engine.begin_instruction();
            let values = engine.map(&totals, |p| p.value.clone());
            let spread = engine.segmented_broadcast_last_by(&values, &totals, |a, b| a.id == b.id, g.cmp)?;
            engine.mzip(&totals, &spread, |p, v| Partial {
                value: v.clone(),
                ..p.clone()
            })?
        }
        None => {
            // reversing puts each complete aggregate first in its segment
            engine.begin_instruction();
            let by_id_asc = engine.sort_by(&totals, |a, b| a.id.cmp(&b.id).then(b.order.cmp(&a.order)));
            engine.begin_instruction();
            let prev = engine.shift(&engine.map(&by_id_asc, |p| Some(p.id)), None);
            engine.begin_instruction();
            let reset = engine.mzip(&by_id_asc, &prev, |p, &h| Partial {
                value: neutral_if_eq(monoid, h, p.id, p.value.clone()),
                ..p.clone()
            })?;
            engine.begin_instruction();
            rescan_by_id(engine, &reset, monoid)?
        }
    };

    phases.start("project");
    engine.begin_instruction();
    let picked = engine.flatmap(&distributed, |p| {
        p.anchor.then(|| QueryResult {
            id: p.id,
            value: p.value.clone(),
        })
    });
    let results = engine.sort_by(&picked, |a, b| a.id.cmp(&b.id)).to_vec();
    phases.finish();

    let tally = engine.tally();
    stats.elements_processed = tally.elements;
    stats.primitive_calls = tally.calls;
    stats.instructions = tally.instructions;
    Ok(RunOutput {
        results,
        stats,
        phases: phases.done,
    })
}
