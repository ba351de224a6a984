use crate::error::Error;
use crate::world::{Voxel, WorldConfig};

/// Binary occupancy over the whole world, stored in [`WorldConfig::index`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyGrid {
    world: WorldConfig,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(world: WorldConfig) -> Self {
        Self {
            world,
            cells: vec![false; world.volume()],
        }
    }

    /// Builds a grid from cells laid out in index order.
    pub fn from_cells(world: WorldConfig, cells: Vec<bool>) -> Option<Self> {
        (cells.len() == world.volume()).then_some(Self { world, cells })
    }

    pub fn from_voxels<I: IntoIterator<Item = Voxel>>(world: WorldConfig, voxels: I) -> Result<Self, Error> {
        let mut g = Self::new(world);
        for v in voxels {
            if !world.contains(v) {
                return Err(Error::OutOfWorldCoordinate {
                    x: v.0 as u64,
                    y: v.1 as u64,
                    z: v.2 as u64,
                });
            }
            g.set(v, true);
        }
        Ok(g)
    }

    pub fn world(&self) -> WorldConfig {
        self.world
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    /// Panics if `v` is outside the world.
    pub fn get(&self, v: Voxel) -> bool {
        assert!(self.world.contains(v), "voxel {v:?} outside world {}", self.world);
        self.cells[self.world.index(v)]
    }

    /// Panics if `v` is outside the world.
    pub fn set(&mut self, v: Voxel, value: bool) {
        assert!(self.world.contains(v), "voxel {v:?} outside world {}", self.world);
        let i = self.world.index(v);
        self.cells[i] = value;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    /// Occupied voxels in ascending lexicographic `(x, y, z)` order.
    pub fn occupied(&self) -> impl Iterator<Item = Voxel> + '_ {
        let world = self.world;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(i, _)| world.voxel_at(i))
    }

    pub(crate) fn check_same_world(&self, other: &OccupancyGrid) -> Result<(), Error> {
        if self.world != other.world {
            return Err(Error::DimensionMismatch {
                expected: self.world,
                found: other.world,
            });
        }
        Ok(())
    }
}
