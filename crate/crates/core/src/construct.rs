//! Greedy voxel-to-brick legalization and seeded random targets.
//!
//! Each layer is tiled independently. Cells are visited in lexicographic
//! `(x, y)` order, optionally rotated by a per-layer phase, and every uncovered
//! target cell anchors the best library brick that fits entirely inside the
//! layer's remaining target cells. A 1x1 always fits, so the cover is exact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::OccupancyGrid;
use crate::world::{Brick, BrickStructure, OrientedDim, WorldConfig, LIBRARY, PROMPT_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructorOptions {
    /// Shift the scan origin by one cell along y on odd layers so seams do not
    /// line up between layers.
    pub stagger: bool,
    /// Seeds the choice among equally large candidates.
    pub seed: u64,
    /// Prefer the largest fitting brick. Otherwise take the first fitting brick
    /// in prompt order.
    pub largest_first: bool,
}

impl Default for ConstructorOptions {
    fn default() -> Self {
        Self {
            stagger: false,
            seed: 0,
            largest_first: true,
        }
    }
}

struct Layer {
    dim_x: u32,
    dim_y: u32,
    open: Vec<bool>,
}

impl Layer {
    fn fits(&self, d: OrientedDim, x: u32, y: u32) -> bool {
        if x + d.h() > self.dim_x || y + d.w() > self.dim_y {
            return false;
        }
        (x..x + d.h()).all(|u| (y..y + d.w()).all(|v| self.open[(u * self.dim_y + v) as usize]))
    }

    fn cover(&mut self, d: OrientedDim, x: u32, y: u32) {
        for u in x..x + d.h() {
            for v in y..y + d.w() {
                self.open[(u * self.dim_y + v) as usize] = false;
            }
        }
    }
}

fn choose(layer: &Layer, x: u32, y: u32, opts: &ConstructorOptions, rng: &mut ChaCha8Rng) -> OrientedDim {
    if !opts.largest_first {
        return PROMPT_ORDER
            .iter()
            .copied()
            .find(|&d| layer.fits(d, x, y))
            .expect("1x1 always fits an open cell");
    }
    let fitting: Vec<OrientedDim> = LIBRARY.iter().copied().filter(|&d| layer.fits(d, x, y)).collect();
    let best = fitting.iter().map(OrientedDim::area).max().expect("1x1 always fits an open cell");
    let ties: Vec<OrientedDim> = fitting.into_iter().filter(|d| d.area() == best).collect();
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.gen_range(0..ties.len())]
    }
}

/// Covers `target` exactly with non-overlapping, in-world bricks.
pub fn legalize(target: &OccupancyGrid, opts: &ConstructorOptions) -> BrickStructure {
    let world = target.world();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = BrickStructure::new();

    for z in 0..world.dim_z {
        let mut layer = Layer {
            dim_x: world.dim_x,
            dim_y: world.dim_y,
            open: Vec::with_capacity((world.dim_x * world.dim_y) as usize),
        };
        for x in 0..world.dim_x {
            for y in 0..world.dim_y {
                layer.open.push(target.get((x, y, z)));
            }
        }
        if !layer.open.iter().any(|&c| c) {
            continue;
        }
        // Odd layers start each row one cell later; the skipped cell is visited last.
        let phase = if opts.stagger { z % 2 } else { 0 };
        for x in 0..world.dim_x {
            for j in 0..world.dim_y {
                let y = (j + phase) % world.dim_y;
                if !layer.open[(x * world.dim_y + y) as usize] {
                    continue;
                }
                let d = choose(&layer, x, y, opts, &mut rng);
                layer.cover(d, x, y);
                out.push(Brick::new(d, x, y, z));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetParams {
    pub max_components: u32,
    pub fill_prob: f64,
    /// Every occupied voxel sits on a solid column reaching z = 0.
    pub grounded: bool,
}

impl Default for TargetParams {
    fn default() -> Self {
        Self {
            max_components: 3,
            fill_prob: 0.7,
            grounded: true,
        }
    }
}

const MAX_BOX_EXTENT: u32 = 8;

/// A seeded pseudo-random union of box-shaped blobs.
pub fn random_target(seed: u64, params: &TargetParams, world: WorldConfig) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = OccupancyGrid::new(world);
    let p = params.fill_prob.clamp(0.0, 1.0);
    if params.max_components == 0 || p == 0.0 {
        return grid;
    }
    let components = rng.gen_range(1..=params.max_components);
    for _ in 0..components {
        let sx = rng.gen_range(1..=world.dim_x.min(MAX_BOX_EXTENT));
        let sy = rng.gen_range(1..=world.dim_y.min(MAX_BOX_EXTENT));
        let sz = rng.gen_range(1..=world.dim_z.min(MAX_BOX_EXTENT));
        let x0 = rng.gen_range(0..=world.dim_x - sx);
        let y0 = rng.gen_range(0..=world.dim_y - sy);
        if params.grounded {
            for x in x0..x0 + sx {
                for y in y0..y0 + sy {
                    if rng.gen_bool(p) {
                        let height = rng.gen_range(1..=sz);
                        for z in 0..height {
                            grid.set((x, y, z), true);
                        }
                    }
                }
            }
        } else {
            let z0 = rng.gen_range(0..=world.dim_z - sz);
            for x in x0..x0 + sx {
                for y in y0..y0 + sy {
                    for z in z0..z0 + sz {
                        if rng.gen_bool(p) {
                            grid.set((x, y, z), true);
                        }
                    }
                }
            }
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, interlock_score, rasterize};

    const W: WorldConfig = WorldConfig {
        dim_x: 20,
        dim_y: 20,
        dim_z: 20,
    };

    #[test]
    fn empty_grid_gives_empty_structure() {
        assert!(legalize(&OccupancyGrid::new(W), &ConstructorOptions::default()).is_empty());
    }

    #[test]
    fn single_voxel() {
        let g = OccupancyGrid::from_voxels(W, [(3, 4, 5)]).unwrap();
        let s = legalize(&g, &ConstructorOptions::default());
        assert_eq!(s.bricks(), &[Brick::new(OrientedDim::lookup(1, 1).unwrap(), 3, 4, 5)]);
    }

    #[test]
    fn two_by_eight_slab() {
        let cells = (0..2).flat_map(|x| (0..8).map(move |y| (x, y, 0)));
        let g = OccupancyGrid::from_voxels(W, cells).unwrap();
        let s = legalize(&g, &ConstructorOptions::default());
        let dims: Vec<String> = s.iter().map(|b| b.dim.to_string()).collect();
        assert_eq!(dims, ["2x6", "2x2"]);
        assert_eq!(rasterize(&s, W).occupied(), g);

        let first_fit = ConstructorOptions {
            largest_first: false,
            ..Default::default()
        };
        let s = legalize(&g, &first_fit);
        let dims: Vec<String> = s.iter().map(|b| b.dim.to_string()).collect();
        assert_eq!(dims, ["2x4", "2x4"]);
        assert_eq!(rasterize(&s, W).occupied(), g);
    }

    #[test]
    fn random_target_basics() {
        let none = TargetParams {
            fill_prob: 0.0,
            ..Default::default()
        };
        assert!(random_target(0, &none, W).is_empty());
        let p = TargetParams::default();
        assert_eq!(random_target(7, &p, W), random_target(7, &p, W));
        assert_ne!(random_target(7, &p, W), random_target(8, &p, W));
    }

    #[test]
    fn grounded_target_legalizes_connected() {
        let g = random_target(1, &TargetParams::default(), W);
        let s = legalize(&g, &ConstructorOptions::default());
        let (field, a) = analyze(&s, W);
        assert_eq!(field.occupied(), g);
        assert_eq!(a.n_col, 0);
        assert_eq!(a.conn_score, 1.0);
    }

    #[test]
    fn stagger_raises_interlock_on_slabs() {
        let slabs = [(6, 10, 3), (4, 8, 2), (8, 8, 4), (10, 12, 3), (2, 8, 2), (1, 12, 3), (6, 6, 2), (20, 20, 5)];
        for (sx, sy, sz) in slabs {
            let cells = (0..sx).flat_map(|x| (0..sy).flat_map(move |y| (0..sz).map(move |z| (x, y, z))));
            let g = OccupancyGrid::from_voxels(W, cells).unwrap();
            let flat = legalize(&g, &ConstructorOptions::default());
            let staggered = legalize(
                &g,
                &ConstructorOptions {
                    stagger: true,
                    ..Default::default()
                },
            );
            assert_eq!(rasterize(&staggered, W).occupied(), g);
            let (a, b) = (interlock_score(&staggered, W), interlock_score(&flat, W));
            assert!(a > b, "{sx}x{sy}x{sz}: stagger {a} <= flat {b}");
        }
    }
}
