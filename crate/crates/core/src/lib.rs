//! Dominance aggregation built from data-parallel sequence primitives.
//!
//! Given weighted data points and query points in `m` dimensions, each query
//! receives the monoid combination of the weights of all data points that are
//! strictly smaller in every coordinate. See [`pipeline::run`].
//!
//! Coordinates are generic over [`Coord`] (`f32`, `f64`) and weights over any
//! [`Monoid`]; the aliases below cover the common instantiations.

pub mod bits;
pub mod cli;
pub mod error;
pub mod monoid;
pub mod oracle;
pub mod pipeline;
pub mod primitives;
pub mod rank_space;
pub mod scalar;
pub mod seq;

pub use bits::{BitString, Role};
pub use error::{Error, Result};
pub use monoid::{Count, GrowthOrder, Max, MaxFrom, Min, Monoid, Sum};
pub use pipeline::{
    run, run_basic, run_improved, ExpansionStats, FastPath, PipelineConfig, Point, QueryResult, RunOutput, Variant,
};
pub use primitives::{Backend, Engine, Tally};
pub use scalar::{Coord, Scalar};
pub use seq::Seq;

pub type Point64<A> = Point<f64, A>;
pub type Point32<A> = Point<f32, A>;
pub type CountPoint = Point<f64, u64>;
pub type SumF64 = Sum<f64>;
pub type SumF32 = Sum<f32>;
pub type SumI64 = Sum<i64>;
pub type MinF64 = Min<f64>;
pub type MaxF64 = Max<f64>;
