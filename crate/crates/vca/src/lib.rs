//! Variable-strength covering arrays (VCAs) over arbitrary hypergraphs.
//!
//! A `VCA(n; H, v)` is an `n x k` array over `Z_v` such that for every
//! hyperedge `e` of `H` the subarray of columns indexed by `e` contains all
//! `v^|e|` tuples as rows. This crate computes upper bounds on the smallest
//! such `n` (symmetric, general and asymmetric Lovász-local-lemma bounds and
//! the density-greedy guarantee), constructs the arrays themselves (uniform
//! random fill, Moser-Tardos resampling, and the VarDens density greedy) and
//! verifies candidate arrays against a hypergraph.
//!
//! Modules mirror the pipeline:
//! - [`hypergraph`]: the coverage-requirement structure and its dependency
//!   analysis (intersection degrees, class-to-class dependency counts).
//! - [`generators`]: hypergraph families used for bound comparison (complete
//!   uniform, cyclic consecutive, random sphere triangulations, Steiner
//!   triple systems, the 15-vertex mixed-strength example).
//! - [`bounds`]: all bound calculators and the numeric local-lemma solvers.
//! - [`construct`]: array construction and verification.
//!
//! The `parallel` feature (on by default) uses rayon for the data-parallel
//! inner loops (per-edge verification, multi-start feasibility searches);
//! results are identical to the sequential fallback.
//!
//! ```
//! use vca::bounds::{n_dens, n_prob_symmetric};
//! use vca::construct::{vardens, verify};
//! use vca::generators::cyclic_consecutive;
//!
//! let h = cyclic_consecutive(20, 3)?;
//! let d = h.dependency_degree()? as u64;
//! assert_eq!(d, 4); // consecutive triples meet four neighbors
//!
//! let array = vardens(&h, 2)?;
//! assert!(verify(&array, &h)?.is_covered());
//! assert!(array.n() as u64 <= n_dens(20, 3, 2).n_int);
//! assert!(n_prob_symmetric(d, 3, 2).n_real < n_dens(20, 3, 2).n_real);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bounds;
pub mod construct;
pub mod generators;
pub mod hypergraph;
mod parallel;

pub use bounds::{BoundReport, BoundsError, DesignParams, EventClassSystem};
pub use construct::{ConstructError, CoverageState, VcaArray, VerifyOutcome};
pub use generators::{DesignBlocks, GeneratorError, TriangulationSeedSpec};
pub use hypergraph::{DependencyMatrix, EdgeClassPartition, Hypergraph, HypergraphError};
