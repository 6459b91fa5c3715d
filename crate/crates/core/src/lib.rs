//! Harness for measuring how faithfully text-embedding models encode scalar
//! numbers.
//!
//! The pipeline renders numbers as canonical decimal strings, embeds them with
//! a provider (live HTTP APIs or deterministic synthetic embedders), and
//! quantifies how linearly the resulting vectors encode the underlying value:
//! held-out R² of a least-squares reconstruction, held-out R² of a univariate
//! fit from the first principal-component score, and the share of variance
//! that first component explains.
//!
//! # Quick start
//!
//! ```
//! use numprobe::metrics::{run_sweep, SweepOptions};
//! use numprobe::numgen::Family;
//! use numprobe::providers::{ModelRef, SyntheticEmbedder};
//!
//! let model = ModelRef::parse("synthetic:linear/d=16").unwrap();
//! let embedder = SyntheticEmbedder::new(&model).unwrap();
//! let sweep = run_sweep(
//!     Family::PositiveDecimals,
//!     &[1, 2],
//!     &embedder,
//!     None,
//!     &SweepOptions { n: 50, seed: 7, ..SweepOptions::default() },
//! )
//! .unwrap();
//! // A noiseless linear embedder encodes the value perfectly.
//! assert!(sweep.points[0].triple.linear_r2.mean > 0.999);
//! ```

pub mod metrics;
pub mod numerics;
pub mod numgen;
pub mod providers;
pub mod report;

pub use metrics::{MetricKind, MetricResult, MetricTriple, SweepResult};
pub use numgen::{ExactDecimal, Family, FoldAssignment, PrecisionSpec, ScalarDataset};
pub use providers::{CacheStore, Embedder, EmbeddingMatrix, ModelRef, Provider};
