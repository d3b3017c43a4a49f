//! Box covering and transfinite fractal dimension of graph sequences.

pub mod cover;
pub mod edgelist;
pub mod error;
pub mod dim;
pub mod graph;
pub mod hm;
pub mod rng;
pub mod shm;
pub mod tree;

pub use cover::{BoxCover, CoverError, CoverMethod, WitnessSet};
pub use error::{Error, Result};
pub use graph::{Graph, GraphBuilder, MetricMode};
