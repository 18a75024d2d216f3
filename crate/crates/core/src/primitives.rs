//! Sequence primitives: sort, map, flat map, zip, scan and segmented scan,
//! plus the `shift` and `bm` macros built from them.
//!
//! An [`Engine`] runs every primitive on one of two backends. The sequential
//! backend is the reference. The parallel backend splits sequences into
//! contiguous chunks on a rayon pool; scans run chunk-local, then scan the
//! chunk totals, then apply the offsets. Both backends return element-wise
//! equal results for discrete monoids. Floating point sums may round
//! differently.
//!
//! The engine also counts primitive invocations and the elements they touch,
//! so pipelines can report their operation counts.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Debug;
use std::marker::PhantomData;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{Error, Result};
use crate::monoid::{MaxFrom, Monoid};
use crate::seq::Seq;

/// Default smallest chunk the parallel backend hands to one task.
pub const DEFAULT_MIN_CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    /// `threads == 0` uses rayon's default width.
    Parallel { threads: usize },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Sequential => "sequential",
            Backend::Parallel { .. } => "parallel",
        }
    }
}

fn shared_pool(threads: usize) -> Arc<ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    pools
        .entry(threads)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(|i| format!("domscan-{i}"))
                    .build()
                    .expect("failed to build thread pool"),
            )
        })
        .clone()
}

#[derive(Debug, Default)]
struct Counters {
    calls: AtomicU64,
    elements: AtomicU64,
    instructions: AtomicU64,
}

/// Snapshot of an engine's instrumentation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    /// Public primitive and macro invocations.
    pub calls: u64,
    /// Input plus output elements summed over all invocations.
    pub elements: u64,
    /// Algorithm-level steps marked with [`Engine::begin_instruction`].
    pub instructions: u64,
}

/// Executes sequence primitives on a chosen backend.
pub struct Engine {
    backend: Backend,
    pool: Option<Arc<ThreadPool>>,
    min_chunk: usize,
    counters: Counters,
}

impl Engine {
    pub fn new(backend: Backend) -> Self {
        let pool = match backend {
            Backend::Sequential => None,
            Backend::Parallel { threads } => Some(shared_pool(threads)),
        };
        Engine {
            backend,
            pool,
            min_chunk: DEFAULT_MIN_CHUNK,
            counters: Counters::default(),
        }
    }

    pub fn sequential() -> Self {
        Self::new(Backend::Sequential)
    }

    pub fn parallel(threads: usize) -> Self {
        Self::new(Backend::Parallel { threads })
    }

    /// Sets the smallest chunk length of the parallel backend (at least 1).
    pub fn with_min_chunk(mut self, min_chunk: usize) -> Self {
        self.min_chunk = min_chunk.max(1);
        self
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Same backend and chunking with zeroed counters.
    pub fn fresh(&self) -> Engine {
        Engine {
            backend: self.backend,
            pool: self.pool.clone(),
            min_chunk: self.min_chunk,
            counters: Counters::default(),
        }
    }

    pub fn tally(&self) -> Tally {
        Tally {
            calls: self.counters.calls.load(AtomicOrdering::Relaxed),
            elements: self.counters.elements.load(AtomicOrdering::Relaxed),
            instructions: self.counters.instructions.load(AtomicOrdering::Relaxed),
        }
    }

    pub fn begin_instruction(&self) {
        self.counters
            .instructions
            .fetch_add(1, AtomicOrdering::Relaxed);
    }

    fn record(&self, elements: usize) {
        self.counters.calls.fetch_add(1, AtomicOrdering::Relaxed);
        self.counters
            .elements
            .fetch_add(elements as u64, AtomicOrdering::Relaxed);
    }

    fn pool_for(&self, n: usize) -> Option<&ThreadPool> {
        self.pool.as_deref().filter(|_| n > self.min_chunk)
    }

    fn chunk_len(&self, pool: &ThreadPool, n: usize) -> usize {
        let tasks = pool.current_num_threads().max(1) * 4;
        n.div_ceil(tasks).max(self.min_chunk)
    }

    // ---------------------------------------------------------------------
    // map / flatmap / zip

    /// `[f(x_1), …, f(x_n)]`.
    pub fn map<T, U, F>(&self, x: &Seq<T>, f: F) -> Seq<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        self.record(2 * x.len());
        Seq::from(self.map_impl(x.as_slice(), f))
    }

    fn map_impl<T, U, F>(&self, x: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self.pool_for(x.len()) {
            Some(pool) => {
                let min = self.min_chunk;
                pool.install(|| x.par_iter().with_min_len(min).map(&f).collect())
            }
            None => x.iter().map(f).collect(),
        }
    }

    /// `f(x_1) + … + f(x_n)` where `+` is concatenation.
    pub fn flatmap<T, U, I, F>(&self, x: &Seq<T>, f: F) -> Seq<U>
    where
        T: Sync,
        U: Send,
        I: IntoIterator<Item = U>,
        F: Fn(&T) -> I + Sync + Send,
    {
        let x = x.as_slice();
        let out: Vec<U> = match self.pool_for(x.len()) {
            Some(pool) => {
                let min = self.min_chunk;
                pool.install(|| (0..x.len()).into_par_iter().with_min_len(min).flat_map_iter(|i| f(&x[i])).collect())
            }
            None => x.iter().flat_map(f).collect(),
        };
        self.record(x.len() + out.len());
        Seq::from(out)
    }

    fn check_len(a: usize, b: usize) -> Result<()> {
        if a == b {
            Ok(())
        } else {
            Err(Error::LengthMismatch { left: a, right: b })
        }
    }

    fn indexed<U, F>(&self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        match self.pool_for(n) {
            Some(pool) => {
                let min = self.min_chunk;
                pool.install(|| (0..n).into_par_iter().with_min_len(min).map(&f).collect())
            }
            None => (0..n).map(f).collect(),
        }
    }

    pub fn zip<A, B>(&self, a: &Seq<A>, b: &Seq<B>) -> Result<Seq<(A, B)>>
    where
        A: Clone + Send + Sync,
        B: Clone + Send + Sync,
    {
        Self::check_len(a.len(), b.len())?;
        self.record(3 * a.len());
        Ok(Seq::from(
            self.indexed(a.len(), |i| (a[i].clone(), b[i].clone())),
        ))
    }

    pub fn zip3<A, B, C>(&self, a: &Seq<A>, b: &Seq<B>, c: &Seq<C>) -> Result<Seq<(A, B, C)>>
    where
        A: Clone + Send + Sync,
        B: Clone + Send + Sync,
        C: Clone + Send + Sync,
    {
        Self::check_len(a.len(), b.len())?;
        Self::check_len(a.len(), c.len())?;
        self.record(4 * a.len());
        Ok(Seq::from(self.indexed(a.len(), |i| {
            (a[i].clone(), b[i].clone(), c[i].clone())
        })))
    }

    /// Zip of any number of equally long sequences of one element type.
    pub fn zip_all<T>(&self, xs: &[Seq<T>]) -> Result<Seq<Vec<T>>>
    where
        T: Clone + Send + Sync,
    {
        let n = xs.first().map_or(0, Seq::len);
        for x in xs {
            Self::check_len(n, x.len())?;
        }
        self.record((xs.len() + 1) * n);
        Ok(Seq::from(self.indexed(n, |i| {
            xs.iter().map(|x| x[i].clone()).collect()
        })))
    }

    /// `map(zip(a, b), f)`.
    pub fn mzip<A, B, U, F>(&self, a: &Seq<A>, b: &Seq<B>, f: F) -> Result<Seq<U>>
    where
        A: Sync,
        B: Sync,
        U: Send,
        F: Fn(&A, &B) -> U + Sync + Send,
    {
        Self::check_len(a.len(), b.len())?;
        self.record(3 * a.len());
        let (a, b) = (a.as_slice(), b.as_slice());
        Ok(Seq::from(self.indexed(a.len(), |i| f(&a[i], &b[i]))))
    }

    /// `map(zip(a, b, c), f)`.
    pub fn mzip3<A, B, C, U, F>(&self, a: &Seq<A>, b: &Seq<B>, c: &Seq<C>, f: F) -> Result<Seq<U>>
    where
        A: Sync,
        B: Sync,
        C: Sync,
        U: Send,
        F: Fn(&A, &B, &C) -> U + Sync + Send,
    {
        Self::check_len(a.len(), b.len())?;
        Self::check_len(a.len(), c.len())?;
        self.record(4 * a.len());
        let (a, b, c) = (a.as_slice(), b.as_slice(), c.as_slice());
        Ok(Seq::from(self.indexed(a.len(), |i| f(&a[i], &b[i], &c[i]))))
    }

    /// `flatmap(zip(a, b), f)`.
    pub fn fmzip<A, B, U, I, F>(&self, a: &Seq<A>, b: &Seq<B>, f: F) -> Result<Seq<U>>
    where
        A: Sync,
        B: Sync,
        U: Send,
        I: IntoIterator<Item = U>,
        F: Fn(&A, &B) -> I + Sync + Send,
    {
        Self::check_len(a.len(), b.len())?;
        let (a, b) = (a.as_slice(), b.as_slice());
        let n = a.len();
        let out: Vec<U> = match self.pool_for(n) {
            Some(pool) => {
                let min = self.min_chunk;
                pool.install(|| {
                    (0..n)
                        .into_par_iter()
                        .with_min_len(min)
                        .flat_map_iter(|i| f(&a[i], &b[i]))
                        .collect()
                })
            }
            None => (0..n).flat_map(|i| f(&a[i], &b[i])).collect(),
        };
        self.record(2 * n + out.len());
        Ok(Seq::from(out))
    }

    /// `x` followed by `y`.
    pub fn concat<T>(&self, x: &Seq<T>, y: &Seq<T>) -> Seq<T>
    where
        T: Clone,
    {
        let mut out = Vec::with_capacity(x.len() + y.len());
        out.extend_from_slice(x.as_slice());
        out.extend_from_slice(y.as_slice());
        self.record(2 * out.len());
        Seq::from(out)
    }

    // ---------------------------------------------------------------------
    // sort

    /// Stable sort under `cmp`.
    ///
    /// Stability makes the output a deterministic function of the input on
    /// both backends even when `cmp` has ties; pipelines still pass total
    /// orders (ties broken by identifier).
    pub fn sort_by<T, F>(&self, x: &Seq<T>, cmp: F) -> Seq<T>
    where
        T: Clone + Send + Sync,
        F: Fn(&T, &T) -> Ordering + Sync + Send,
    {
        self.record(2 * x.len());
        Seq::from(self.sort_impl(x.as_slice(), cmp))
    }

    fn sort_impl<T, F>(&self, x: &[T], cmp: F) -> Vec<T>
    where
        T: Clone + Send + Sync,
        F: Fn(&T, &T) -> Ordering + Sync + Send,
    {
        let mut v = x.to_vec();
        match self.pool_for(v.len()) {
            Some(pool) => pool.install(|| v.par_sort_by(cmp)),
            None => v.sort_by(cmp),
        }
        v
    }

    // ---------------------------------------------------------------------
    // scans

    /// Inclusive prefix aggregation: element `i` is `x_1 ⊕ … ⊕ x_i`.
    pub fn scan<M: Monoid>(&self, x: &Seq<M::Value>, monoid: &M) -> Seq<M::Value> {
        self.record(2 * x.len());
        Seq::from(self.scan_impl(x.as_slice(), monoid, true))
    }

    /// Exclusive prefix aggregation: element `i` is `e ⊕ x_1 ⊕ … ⊕ x_{i-1}`.
    pub fn exclusive_scan<M: Monoid>(&self, x: &Seq<M::Value>, monoid: &M) -> Seq<M::Value> {
        self.record(2 * x.len());
        Seq::from(self.scan_impl(x.as_slice(), monoid, false))
    }

    fn scan_seq<M: Monoid>(x: &[M::Value], monoid: &M, start: M::Value, inclusive: bool) -> Vec<M::Value> {
        let mut out = Vec::with_capacity(x.len());
        let mut acc = start;
        for v in x {
            if inclusive {
                acc = monoid.combine(&acc, v);
                out.push(acc.clone());
            } else {
                let next = monoid.combine(&acc, v);
                out.push(std::mem::replace(&mut acc, next));
            }
        }
        out
    }

    fn scan_impl<M: Monoid>(&self, x: &[M::Value], monoid: &M, inclusive: bool) -> Vec<M::Value> {
        let Some(pool) = self.pool_for(x.len()) else {
            return Self::scan_seq(x, monoid, monoid.unit(), inclusive);
        };
        let chunk = self.chunk_len(pool, x.len());
        pool.install(|| {
            // chunk-local inclusive scans
            let locals: Vec<Vec<M::Value>> = x
                .par_chunks(chunk)
                .map(|c| Self::scan_seq(c, monoid, monoid.unit(), true))
                .collect();
            // exclusive scan of chunk totals
            let mut offsets = Vec::with_capacity(locals.len());
            let mut acc = monoid.unit();
            for local in &locals {
                offsets.push(acc.clone());
                acc = monoid.combine(&acc, local.last().expect("chunks are nonempty"));
            }
            let parts: Vec<Vec<M::Value>> = locals
                .par_iter()
                .zip(offsets.par_iter())
                .enumerate()
                .map(|(k, (local, offset))| {
                    if inclusive {
                        if k == 0 {
                            local.clone()
                        } else {
                            local.iter().map(|v| monoid.combine(offset, v)).collect()
                        }
                    } else {
                        let mut out = Vec::with_capacity(local.len());
                        out.push(offset.clone());
                        out.extend(local[..local.len() - 1].iter().map(|v| monoid.combine(offset, v)));
                        out
                    }
                })
                .collect();
            parts.concat()
        })
    }

    /// Right shift `[⊥, x_1, …, x_{n-1}]` of a nondecreasing sequence,
    /// computed as an exclusive max-scan with unit `bottom`.
    ///
    /// `bottom` must lie below every element: `-inf` for coordinates,
    /// `None` for optional identifiers.
    pub fn shift<T>(&self, x: &Seq<T>, bottom: T) -> Seq<T>
    where
        T: Clone + PartialOrd + Debug + Send + Sync,
    {
        self.record(2 * x.len());
        Seq::from(self.scan_impl(x.as_slice(), &MaxFrom::new(bottom), false))
    }

    /// Broadcasts the maximum to every position: sort descending, then
    /// max-scan.
    pub fn bm<T>(&self, x: &Seq<T>, bottom: T) -> Seq<T>
    where
        T: Clone + PartialOrd + Debug + Send + Sync,
    {
        self.record(2 * x.len());
        let desc = self.sort_impl(x.as_slice(), |a, b| {
            b.partial_cmp(a).unwrap_or(Ordering::Equal)
        });
        Seq::from(self.scan_impl(&desc, &MaxFrom::new(bottom), true))
    }

    /// Independent inclusive scans over maximal runs of equal tags.
    pub fn segmented_scan<M, T>(&self, a: &Seq<M::Value>, tags: &Seq<T>, monoid: &M) -> Result<Seq<M::Value>>
    where
        M: Monoid,
        T: PartialEq + Sync,
    {
        self.segmented_scan_by(a, tags, |x, y| x == y, monoid)
    }

    /// [`Engine::segmented_scan`] with segment equality given by `same`,
    /// for tag records of which only some fields define the segment.
    pub fn segmented_scan_by<M, T, S>(
        &self,
        a: &Seq<M::Value>,
        tags: &Seq<T>,
        same: S,
        monoid: &M,
    ) -> Result<Seq<M::Value>>
    where
        M: Monoid,
        T: Sync,
        S: Fn(&T, &T) -> bool + Sync,
    {
        Self::check_len(a.len(), tags.len())?;
        self.record(3 * a.len());
        let t = tags.as_slice();
        Ok(Seq::from(self.segmented_impl(
            a.as_slice(),
            |i| same(&t[i - 1], &t[i]),
            monoid,
        )))
    }

    /// Every position receives the greatest value of its segment under `cmp`.
    pub fn segmented_broadcast_last<A, T, F>(&self, a: &Seq<A>, tags: &Seq<T>, cmp: F) -> Result<Seq<A>>
    where
        A: Clone + PartialEq + Debug + Send + Sync,
        T: PartialEq + Sync,
        F: Fn(&A, &A) -> Ordering + Sync + Send,
    {
        self.segmented_broadcast_last_by(a, tags, |x, y| x == y, cmp)
    }

    pub fn segmented_broadcast_last_by<A, T, S, F>(
        &self,
        a: &Seq<A>,
        tags: &Seq<T>,
        same: S,
        cmp: F,
    ) -> Result<Seq<A>>
    where
        A: Clone + PartialEq + Debug + Send + Sync,
        T: Sync,
        S: Fn(&T, &T) -> bool + Sync,
        F: Fn(&A, &A) -> Ordering + Sync + Send,
    {
        Self::check_len(a.len(), tags.len())?;
        self.record(3 * a.len());
        let n = a.len();
        let t = tags.as_slice();
        let monoid = MaxBy::new(cmp);
        // forward segmented max leaves each segment's maximum at its end
        let wrapped = self.map_impl(a.as_slice(), |v| Some(v.clone()));
        let forward = self.segmented_impl(&wrapped, |i| same(&t[i - 1], &t[i]), &monoid);
        // a backward pass over the reversal carries it to the segment start
        let reversed: Vec<Option<A>> = forward.into_iter().rev().collect();
        let backward = self.segmented_impl(
            &reversed,
            |i| same(&t[n - 1 - i], &t[n - i]),
            &monoid,
        );
        Ok(backward
            .into_iter()
            .rev()
            .map(|v| v.expect("every segment holds at least one value"))
            .collect())
    }

    fn segmented_seq<M: Monoid>(
        x: &[M::Value],
        offset: usize,
        continues: &(impl Fn(usize) -> bool + Sync),
        monoid: &M,
    ) -> (Vec<M::Value>, usize) {
        // returns the local scan and the length of the leading run
        let mut out = Vec::with_capacity(x.len());
        let mut acc = monoid.unit();
        let mut lead = x.len();
        for (j, v) in x.iter().enumerate() {
            if j > 0 && !continues(offset + j) {
                acc = monoid.unit();
                lead = lead.min(j);
            }
            acc = monoid.combine(&acc, v);
            out.push(acc.clone());
        }
        (out, lead)
    }

    /// `continues(i)` tells whether position `i > 0` belongs to the segment
    /// of position `i - 1`.
    fn segmented_impl<M, S>(&self, x: &[M::Value], continues: S, monoid: &M) -> Vec<M::Value>
    where
        M: Monoid,
        S: Fn(usize) -> bool + Sync,
    {
        let Some(pool) = self.pool_for(x.len()) else {
            return Self::segmented_seq(x, 0, &continues, monoid).0;
        };
        let chunk = self.chunk_len(pool, x.len());
        pool.install(|| {
            let locals: Vec<(Vec<M::Value>, usize)> = x
                .par_chunks(chunk)
                .enumerate()
                .map(|(k, c)| Self::segmented_seq(c, k * chunk, &continues, monoid))
                .collect();
            // carry into each chunk's leading run
            let mut carries: Vec<Option<M::Value>> = Vec::with_capacity(locals.len());
            let mut tail: Option<M::Value> = None;
            for (k, (local, lead)) in locals.iter().enumerate() {
                let carry = if k > 0 && continues(k * chunk) {
                    tail.clone()
                } else {
                    None
                };
                let last = local.last().expect("chunks are nonempty");
                tail = Some(match (&carry, *lead == local.len()) {
                    (Some(c), true) => monoid.combine(c, last),
                    _ => last.clone(),
                });
                carries.push(carry);
            }
            let parts: Vec<Vec<M::Value>> = locals
                .into_par_iter()
                .zip(carries.into_par_iter())
                .map(|((mut local, lead), carry)| {
                    if let Some(c) = carry {
                        for v in &mut local[..lead] {
                            *v = monoid.combine(&c, v);
                        }
                    }
                    local
                })
                .collect();
            parts.concat()
        })
    }
}

impl Default for Engine {
    fn default() -> Self {
        Self::sequential()
    }
}

impl Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("backend", &self.backend)
            .field("min_chunk", &self.min_chunk)
            .field("tally", &self.tally())
            .finish()
    }
}

/// Maximum under a comparator, with `None` as unit.
struct MaxBy<A, F> {
    cmp: F,
    _value: PhantomData<fn() -> A>,
}

impl<A, F> MaxBy<A, F> {
    fn new(cmp: F) -> Self {
        MaxBy {
            cmp,
            _value: PhantomData,
        }
    }
}

impl<A, F> Monoid for MaxBy<A, F>
where
    A: Clone + PartialEq + Debug + Send + Sync,
    F: Fn(&A, &A) -> Ordering + Sync + Send,
{
    type Value = Option<A>;

    fn unit(&self) -> Option<A> {
        None
    }

    fn combine(&self, a: &Option<A>, b: &Option<A>) -> Option<A> {
        match (a, b) {
            (Some(x), Some(y)) => {
                if (self.cmp)(y, x) == Ordering::Greater {
                    Some(y.clone())
                } else {
                    Some(x.clone())
                }
            }
            (Some(x), None) => Some(x.clone()),
            (None, y) => y.clone(),
        }
    }
}
