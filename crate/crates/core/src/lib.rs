//! Output-sensitive restricted sumsets and convolutions.
//!
//! The fast paths all follow one pattern: build a rectangle covering of the
//! index grid `[n] × [m]` whose rectangles together see every pair with an
//! in-range sum, then compute one unrestricted sumset per rectangle.

pub mod adversarial;
pub mod bench;
pub mod covering;
pub mod engine;
pub mod error;
pub mod interval;
pub mod model;
pub mod oracle;
pub mod output_size;
pub mod prefix;
pub mod relaxed;
pub mod subset_sum;
pub mod text;
pub mod topk;

pub use covering::{validate_covering, Covering, IndexRect, ValidationReport};
pub use engine::{Backend, Ctx, EngineConfig, WorkMeter};
pub use error::{Error, Result};
pub use model::{normalize, Instance, SparseSet, SparseVec};
