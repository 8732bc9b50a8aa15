//! Choquet boundaries, representing measures and trace-convexity on finite
//! function systems.
//!
//! A compact space is replaced by finitely many points and the function
//! space by the span of finitely many basis functions evaluated on those
//! points. Every notion then becomes a small linear program: representing
//! measures, the Choquet boundary, the largest minorant from the span, hulls
//! and separation of sets, and the maximum principles.

pub mod convexify;
pub mod generators;
pub mod io;
pub mod lp;
pub mod maxprinciple;
pub mod measures;
pub mod sets;
pub mod space;

mod error;

pub use error::{Error, Result};
pub use space::{pair, FiniteSpace, FunctionSystem, Measure, MeasureKind, PhiFunction, ScalarField};

/// Order-preserving parallel map over `0..n`; the output does not depend on
/// scheduling or thread count.
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}
