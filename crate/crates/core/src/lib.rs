//! Temporal analysis of evolving 2D pixel skeletons.
//!
//! A sequence of frames is thinned to skeletons, pixels are tracked from
//! step to step by nearest-neighbour matching, every pixel gets a creation
//! time, and the creation times feed persistence diagrams, segment filters
//! and activity curves.

pub mod coords;
pub mod creation_time;
pub mod error;
pub mod indicators;
pub mod persistence;
pub mod pipeline;
pub mod pixel;
pub mod skeleton_graph;
pub mod skeletonize;
pub mod synthgen;
pub mod temporal_match;

pub use error::{Error, Result};
pub use pixel::{Pixel, PixelSet};
pub use skeleton_graph::SkeletonGraph;
