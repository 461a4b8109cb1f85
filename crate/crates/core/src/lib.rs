//! Low-imbalance embeddings of spanning forests into red/blue coloured
//! complete graphs.
//!
//! Given a `±1` colouring of the edges of `K_n` and an `n`-vertex forest `F`,
//! the [`solver`] finds a bijection `V(F) -> V(K_n)` whose image has a small
//! colour sum, certifying the bound it achieved. The [`oracle`] computes exact
//! answers by enumeration at small `n`, and [`bounds`] evaluates the
//! closed-form guarantees the solver is measured against.

pub mod bench;
pub mod bounds;
pub mod colouring;
pub mod embedding;
pub mod error;
pub mod forest;
pub mod generators;
pub mod interpolate;
pub mod oracle;
pub mod solver;
pub mod verify;

pub use colouring::{Colour, ColouredCompleteGraph};
pub use embedding::{subgraph_sum, Embedding, EmbeddingRecord, PartialEmbedding};
pub use error::{Error, Result};
pub use forest::Forest;
