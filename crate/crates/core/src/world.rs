//! The discrete voxel world, the oriented brick library and single-brick geometry.
//!
//! Axis convention: a brick `h x w` spans `h` cells along x and `w` cells along y.
//! Every brick is exactly one voxel tall.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A voxel coordinate `(x, y, z)`.
pub type Voxel = (u32, u32, u32);

/// Dimensions of the fixed voxel world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorldConfig {
    pub dim_x: u32,
    pub dim_y: u32,
    pub dim_z: u32,
}

impl WorldConfig {
    pub const DEFAULT_DIM: u32 = 20;

    pub fn new(dim_x: u32, dim_y: u32, dim_z: u32) -> Result<Self, Error> {
        if dim_x == 0 || dim_y == 0 || dim_z == 0 {
            return Err(Error::InvalidWorld { dim_x, dim_y, dim_z });
        }
        Ok(Self { dim_x, dim_y, dim_z })
    }

    /// Number of voxels in the world.
    pub fn volume(&self) -> usize {
        self.dim_x as usize * self.dim_y as usize * self.dim_z as usize
    }

    pub fn contains(&self, (x, y, z): Voxel) -> bool {
        x < self.dim_x && y < self.dim_y && z < self.dim_z
    }

    /// Row-major index with x as the slowest axis: `(x * dim_y + y) * dim_z + z`.
    #[inline]
    pub fn index(&self, (x, y, z): Voxel) -> usize {
        (x as usize * self.dim_y as usize + y as usize) * self.dim_z as usize + z as usize
    }

    #[inline]
    pub fn voxel_at(&self, index: usize) -> Voxel {
        let dz = self.dim_z as usize;
        let dy = self.dim_y as usize;
        let z = index % dz;
        let y = (index / dz) % dy;
        let x = index / (dz * dy);
        (x as u32, y as u32, z as u32)
    }
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            dim_x: Self::DEFAULT_DIM,
            dim_y: Self::DEFAULT_DIM,
            dim_z: Self::DEFAULT_DIM,
        }
    }
}

impl fmt::Display for WorldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.dim_x, self.dim_y, self.dim_z)
    }
}

/// An oriented brick footprint from the fixed library.
///
/// Only values from [`LIBRARY`] can be constructed, so holding an
/// `OrientedDim` proves the footprint is legal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedDim {
    h: u8,
    w: u8,
}

impl OrientedDim {
    const fn raw(h: u8, w: u8) -> Self {
        Self { h, w }
    }

    /// Looks up the library variant with extent `h` along x and `w` along y.
    pub fn lookup(h: u32, w: u32) -> Result<Self, Error> {
        LIBRARY
            .iter()
            .copied()
            .find(|d| d.h as u32 == h && d.w as u32 == w)
            .ok_or(Error::UnknownDimension { h, w })
    }

    /// Extent along x.
    pub fn h(&self) -> u32 {
        self.h as u32
    }

    /// Extent along y.
    pub fn w(&self) -> u32 {
        self.w as u32
    }

    pub fn area(&self) -> u32 {
        self.h() * self.w()
    }
}

impl fmt::Display for OrientedDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.h, self.w)
    }
}

/// The 14 oriented variants of the 8 brick types.
pub const LIBRARY: [OrientedDim; 14] = [
    OrientedDim::raw(1, 1),
    OrientedDim::raw(1, 2),
    OrientedDim::raw(2, 1),
    OrientedDim::raw(1, 4),
    OrientedDim::raw(4, 1),
    OrientedDim::raw(1, 6),
    OrientedDim::raw(6, 1),
    OrientedDim::raw(1, 8),
    OrientedDim::raw(8, 1),
    OrientedDim::raw(2, 2),
    OrientedDim::raw(2, 4),
    OrientedDim::raw(4, 2),
    OrientedDim::raw(2, 6),
    OrientedDim::raw(6, 2),
];

/// The same library in the order the instruction prompt lists it.
pub const PROMPT_ORDER: [OrientedDim; 14] = [
    OrientedDim::raw(2, 4),
    OrientedDim::raw(4, 2),
    OrientedDim::raw(2, 6),
    OrientedDim::raw(6, 2),
    OrientedDim::raw(1, 2),
    OrientedDim::raw(2, 1),
    OrientedDim::raw(1, 4),
    OrientedDim::raw(4, 1),
    OrientedDim::raw(1, 6),
    OrientedDim::raw(6, 1),
    OrientedDim::raw(1, 8),
    OrientedDim::raw(8, 1),
    OrientedDim::raw(1, 1),
    OrientedDim::raw(2, 2),
];

/// Half-open axis-aligned rectangle of cells `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: u32,
    pub x1: u32,
    pub y0: u32,
    pub y1: u32,
}

impl Rect {
    pub fn is_empty(&self) -> bool {
        self.x0 >= self.x1 || self.y0 >= self.y1
    }

    pub fn area(&self) -> u32 {
        if self.is_empty() {
            0
        } else {
            (self.x1 - self.x0) * (self.y1 - self.y0)
        }
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        !self.is_empty()
            && !other.is_empty()
            && self.x0 < other.x1
            && other.x0 < self.x1
            && self.y0 < other.y1
            && other.y0 < self.y1
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        self.x0 <= x && x < self.x1 && self.y0 <= y && y < self.y1
    }
}

/// One oriented brick placement, anchored at the minimum corner of its footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Brick {
    pub dim: OrientedDim,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Brick {
    pub fn new(dim: OrientedDim, x: u32, y: u32, z: u32) -> Self {
        Self { dim, x, y, z }
    }

    /// Unclipped footprint. Coordinates are widened so anchors near `u32::MAX`
    /// cannot overflow.
    pub fn footprint(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let (x0, y0) = (self.x as u64, self.y as u64);
        let (h, w) = (self.dim.h() as u64, self.dim.w() as u64);
        (x0..x0 + h).flat_map(move |u| (y0..y0 + w).map(move |v| (u, v)))
    }

    /// Footprint clipped to the world, or an empty rectangle when the brick's
    /// layer lies outside the world.
    pub fn clipped_footprint(&self, world: &WorldConfig) -> Rect {
        if self.z >= world.dim_z {
            return Rect { x0: 0, x1: 0, y0: 0, y1: 0 };
        }
        let end_x = (self.x as u64 + self.dim.h() as u64).min(world.dim_x as u64) as u32;
        let end_y = (self.y as u64 + self.dim.w() as u64).min(world.dim_y as u64) as u32;
        Rect {
            x0: self.x.min(end_x),
            x1: end_x,
            y0: self.y.min(end_y),
            y1: end_y,
        }
    }

    pub fn fully_in_bounds(&self, world: &WorldConfig) -> bool {
        self.z < world.dim_z
            && self.x as u64 + self.dim.h() as u64 <= world.dim_x as u64
            && self.y as u64 + self.dim.w() as u64 <= world.dim_y as u64
    }

    /// The brick's voxels inside the world (ascending order), and whether the whole
    /// footprint fits.
    pub fn voxels(&self, world: &WorldConfig) -> (Vec<Voxel>, bool) {
        let r = self.clipped_footprint(world);
        let mut out = Vec::with_capacity(r.area() as usize);
        for u in r.x0..r.x1 {
            for v in r.y0..r.y1 {
                out.push((u, v, self.z));
            }
        }
        (out, self.fully_in_bounds(world))
    }
}

impl fmt::Display for Brick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({},{},{})", self.dim, self.x, self.y, self.z)
    }
}

/// An ordered brick sequence. Order matters only for serialization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BrickStructure {
    bricks: Vec<Brick>,
}

impl BrickStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bricks(&self) -> &[Brick] {
        &self.bricks
    }

    pub fn push(&mut self, brick: Brick) {
        self.bricks.push(brick);
    }

    pub fn len(&self) -> usize {
        self.bricks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bricks.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Brick> {
        self.bricks.iter()
    }

    pub fn fully_in_bounds(&self, world: &WorldConfig) -> bool {
        self.bricks.iter().all(|b| b.fully_in_bounds(world))
    }

    pub fn into_vec(self) -> Vec<Brick> {
        self.bricks
    }
}

impl From<Vec<Brick>> for BrickStructure {
    fn from(bricks: Vec<Brick>) -> Self {
        Self { bricks }
    }
}

impl FromIterator<Brick> for BrickStructure {
    fn from_iter<I: IntoIterator<Item = Brick>>(iter: I) -> Self {
        Self {
            bricks: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a BrickStructure {
    type Item = &'a Brick;
    type IntoIter = std::slice::Iter<'a, Brick>;

    fn into_iter(self) -> Self::IntoIter {
        self.bricks.iter()
    }
}
