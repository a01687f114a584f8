// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod energy;
pub mod error;
pub mod io;
pub mod maf;
pub mod maxflow;
pub mod pipeline;
pub mod raster;
pub mod shape;
pub mod synth;

pub use config::{BiasMode, PriorMode, RunConfig};
pub use error::{Error, Result};
pub use raster::{BBox, BinaryMask, Image};
