//! Distribution-sensitive planar point location.
//!
//! Given a planar subdivision `G` (which may be disconnected) and a query
//! distribution `D` described as a weighted mixture of uniform densities over
//! triangles, this crate builds a partition tree whose expected query cost
//! tracks the entropy of its leaf partition, together with a
//! trapezoidal-map backup structure that answers any query in logarithmic
//! expected time. Everything on the build path uses exact rational
//! arithmetic, so partition conditions, tiling identities, and probability
//! accounting are checked as exact equalities rather than within tolerances.
//!
//! The high-level flow:
//! 1. [`subdivision`] loads and validates `G` and provides the brute-force
//!    location oracle used to label and cross-check everything else.
//! 2. [`measure`] implements the probability oracles (triangle mass, exact
//!    conditioning, conditional sampling) for mixture measures.
//! 3. [`partition`] builds sample-based simplicial partitions of a measure
//!    and verifies the partition conditions exactly.
//! 4. [`lowcross`] adds the low-crossing spanning tree, the segment
//!    arrangement, and the low-stabbing Steiner triangulation of its faces.
//! 5. [`tree`] assembles the recursive partition tree and runs the
//!    two-phase query (tree descent, then [`trapmap`] fallback).
//! 6. [`analysis`] reports leaf entropies and benchmark statistics.

pub mod analysis;
pub mod fixtures;
pub mod geom;
pub mod lowcross;
pub mod measure;
pub mod partition;
pub mod render;
pub mod storage;
pub mod subdivision;
pub mod trapmap;
pub mod tree;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-planar input: edges {0} and {1} intersect away from shared endpoints")]
    NonPlanarInput(usize, usize),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("zero-mass region")]
    ZeroMassRegion,
    #[error("negative mass")]
    NegativeMass,
    #[error("partition failed after {retries} attempts")]
    PartitionFailed { retries: u32 },
    #[error("degenerate face")]
    DegenerateFace,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("verification failed at {path}: {reason}")]
    VerifyFailed { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
