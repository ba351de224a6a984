//! Geometry, parsing, physical rewards and evaluation metrics for brick
//! structures generated in a fixed voxel world.

pub mod analysis;
pub mod construct;
pub mod dataset;
mod error;
pub mod grid;
pub mod metrics;
pub mod parser;
pub mod reward;
pub mod world;

pub use error::{CodecError, Error};
pub use grid::OccupancyGrid;
pub use world::{Brick, BrickStructure, OrientedDim, Voxel, WorldConfig, LIBRARY};
