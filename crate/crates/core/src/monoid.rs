//! Commutative monoids used as aggregation structures.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::marker::PhantomData;

use crate::scalar::Scalar;

/// Order under which combining never decreases a value, i.e.
/// `combine(a, b) >= a`, provided every weight satisfies `admits`.
///
/// Monoids exposing one can distribute a segment's total with a
/// segmented maximum instead of the general reset-and-rescan sequence.
pub struct GrowthOrder<V> {
    pub cmp: fn(&V, &V) -> Ordering,
    pub admits: fn(&V) -> bool,
}

impl<V> Clone for GrowthOrder<V> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<V> Copy for GrowthOrder<V> {}

/// An associative, commutative combine with a neutral element.
pub trait Monoid: Send + Sync {
    type Value: Clone + PartialEq + Debug + Send + Sync;

    fn unit(&self) -> Self::Value;

    fn combine(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    /// Equality used for verification. Defaults to `==`.
    fn equivalent(&self, a: &Self::Value, b: &Self::Value) -> bool {
        a == b
    }

    fn growth_order(&self) -> Option<GrowthOrder<Self::Value>> {
        None
    }

    fn fold<'a, I>(&self, values: I) -> Self::Value
    where
        I: IntoIterator<Item = &'a Self::Value>,
        Self::Value: 'a,
    {
        values
            .into_iter()
            .fold(self.unit(), |acc, v| self.combine(&acc, v))
    }
}

fn natural<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

fn reversed<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    natural(b, a)
}

fn admit_all<T>(_: &T) -> bool {
    true
}

fn non_negative<T: Scalar>(w: &T) -> bool {
    *w >= T::zero()
}

/// Number of dominated data points. Every data weight is expected to be 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Count;

impl Monoid for Count {
    type Value = u64;

    fn unit(&self) -> u64 {
        0
    }

    fn combine(&self, a: &u64, b: &u64) -> u64 {
        a + b
    }

    fn growth_order(&self) -> Option<GrowthOrder<u64>> {
        Some(GrowthOrder {
            cmp: natural,
            admits: admit_all,
        })
    }
}

/// Addition with unit zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sum<T>(PhantomData<T>);

impl<T> Sum<T> {
    pub fn new() -> Self {
        Sum(PhantomData)
    }
}

impl<T> Default for Sum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Monoid for Sum<T> {
    type Value = T;

    fn unit(&self) -> T {
        T::zero()
    }

    fn combine(&self, a: &T, b: &T) -> T {
        *a + *b
    }

    fn equivalent(&self, a: &T, b: &T) -> bool {
        T::tolerant_eq(*a, *b)
    }

    fn growth_order(&self) -> Option<GrowthOrder<T>> {
        Some(GrowthOrder {
            cmp: natural,
            admits: non_negative,
        })
    }
}

/// Minimum with unit `+inf` (or the type's maximum).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Min<T>(PhantomData<T>);

impl<T> Min<T> {
    pub fn new() -> Self {
        Min(PhantomData)
    }
}

impl<T> Default for Min<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Monoid for Min<T> {
    type Value = T;

    fn unit(&self) -> T {
        T::highest()
    }

    fn combine(&self, a: &T, b: &T) -> T {
        if *b < *a {
            *b
        } else {
            *a
        }
    }

    // min never increases, so it grows under the reversed order
    fn growth_order(&self) -> Option<GrowthOrder<T>> {
        Some(GrowthOrder {
            cmp: reversed,
            admits: admit_all,
        })
    }
}

/// Maximum with unit `-inf` (or the type's minimum).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Max<T>(PhantomData<T>);

impl<T> Max<T> {
    pub fn new() -> Self {
        Max(PhantomData)
    }
}

impl<T> Default for Max<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Monoid for Max<T> {
    type Value = T;

    fn unit(&self) -> T {
        T::lowest()
    }

    fn combine(&self, a: &T, b: &T) -> T {
        if *b > *a {
            *b
        } else {
            *a
        }
    }

    fn growth_order(&self) -> Option<GrowthOrder<T>> {
        Some(GrowthOrder {
            cmp: natural,
            admits: admit_all,
        })
    }
}

/// Maximum over any ordered type with an explicit bottom element.
/// Backs the `shift` and `bm` macros.
#[derive(Debug, Clone)]
pub struct MaxFrom<T> {
    bottom: T,
}

impl<T> MaxFrom<T> {
    pub fn new(bottom: T) -> Self {
        MaxFrom { bottom }
    }
}

impl<T> Monoid for MaxFrom<T>
where
    T: Clone + PartialOrd + Debug + Send + Sync,
{
    type Value = T;

    fn unit(&self) -> T {
        self.bottom.clone()
    }

    fn combine(&self, a: &T, b: &T) -> T {
        if *b > *a {
            b.clone()
        } else {
            a.clone()
        }
    }
}
