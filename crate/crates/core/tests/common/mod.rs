#![allow(dead_code)]

pub mod oracle;

use brickrl_core::{Brick, BrickStructure, OccupancyGrid, WorldConfig, LIBRARY};
use proptest::prelude::*;

pub const WORLD: WorldConfig = WorldConfig {
    dim_x: 20,
    dim_y: 20,
    dim_z: 20,
};

pub const SMALL: WorldConfig = WorldConfig {
    dim_x: 6,
    dim_y: 6,
    dim_z: 6,
};

/// Bricks anchored anywhere up to `slack` cells past the world edge.
pub fn brick_in(world: WorldConfig, slack: u32) -> impl Strategy<Value = Brick> {
    (
        0..LIBRARY.len(),
        0..world.dim_x + slack,
        0..world.dim_y + slack,
        0..world.dim_z + slack,
    )
        .prop_map(|(d, x, y, z)| Brick::new(LIBRARY[d], x, y, z))
}

pub fn structure_in(world: WorldConfig, slack: u32, max: usize) -> impl Strategy<Value = BrickStructure> {
    prop::collection::vec(brick_in(world, slack), 0..=max).prop_map(BrickStructure::from)
}

pub fn grid_in(world: WorldConfig) -> impl Strategy<Value = OccupancyGrid> {
    prop::collection::vec(prop::bool::weighted(0.3), world.volume())
        .prop_map(move |cells| OccupancyGrid::from_cells(world, cells).unwrap())
}
