//! Rasterization and structural predicates over a brick structure.
//!
//! Connectivity is evaluated on the brick support graph: two bricks are linked
//! when they sit in adjacent layers and their world-clipped footprints share at
//! least one cell. Side contact within a layer never links bricks.

use serde::Serialize;

use crate::grid::OccupancyGrid;
use crate::world::{Brick, BrickStructure, Rect, Voxel, WorldConfig};

const NO_OWNER: u32 = u32::MAX;

/// Per-voxel brick counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyField {
    world: WorldConfig,
    counts: Vec<u32>,
}

impl OccupancyField {
    pub fn world(&self) -> WorldConfig {
        self.world
    }

    pub fn count(&self, v: Voxel) -> u32 {
        self.counts[self.world.index(v)]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn occupied(&self) -> OccupancyGrid {
        let cells = self.counts.iter().map(|&c| c > 0).collect();
        OccupancyGrid::from_cells(self.world, cells).expect("field sized to world")
    }

    pub fn occupied_count(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

pub fn rasterize(structure: &BrickStructure, world: WorldConfig) -> OccupancyField {
    let mut counts = vec![0u32; world.volume()];
    for b in structure {
        let r = b.clipped_footprint(&world);
        for x in r.x0..r.x1 {
            for y in r.y0..r.y1 {
                counts[world.index((x, y, b.z))] += 1;
            }
        }
    }
    OccupancyField { world, counts }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollisionStats {
    pub n_col: usize,
    /// Voxels covered by more than one brick, ascending.
    pub colliding: Vec<Voxel>,
}

pub fn collision_stats(field: &OccupancyField) -> CollisionStats {
    let colliding: Vec<Voxel> = field
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 1)
        .map(|(i, _)| field.world.voxel_at(i))
        .collect();
    CollisionStats {
        n_col: colliding.len(),
        colliding,
    }
}

/// Undirected support adjacency over brick indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportGraph {
    z: Vec<u32>,
    adjacency: Vec<Vec<usize>>,
}

impl SupportGraph {
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(&j)
    }

    /// Bricks one layer below `i` whose footprints overlap it.
    pub fn supports(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let zi = self.z[i];
        self.adjacency[i]
            .iter()
            .copied()
            .filter(move |&j| self.z[j] + 1 == zi)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Bricks with a non-empty clipped footprint, bucketed by layer.
fn layers(bricks: &[Brick], world: &WorldConfig) -> Vec<Vec<(usize, Rect)>> {
    let mut layers = vec![Vec::new(); world.dim_z as usize];
    for (i, b) in bricks.iter().enumerate() {
        let r = b.clipped_footprint(world);
        if !r.is_empty() {
            layers[b.z as usize].push((i, r));
        }
    }
    layers
}

pub fn support_graph(structure: &BrickStructure, world: WorldConfig) -> SupportGraph {
    let bricks = structure.bricks();
    let layers = layers(bricks, &world);
    let mut adjacency = vec![Vec::new(); bricks.len()];
    for pair in layers.windows(2) {
        for &(i, ri) in &pair[0] {
            for &(j, rj) in &pair[1] {
                if ri.intersects(&rj) {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
    }
    SupportGraph {
        z: bricks.iter().map(|b| b.z).collect(),
        adjacency,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Connectivity {
    /// |O|: occupied voxels.
    pub occupied: usize,
    /// |D|: occupied voxels not covered by any grounded brick.
    pub disconnected: usize,
    pub conn_score: f64,
    pub is_connected: bool,
}

fn connectivity_with(
    structure: &BrickStructure,
    world: WorldConfig,
    field: &OccupancyField,
    graph: &SupportGraph,
) -> Connectivity {
    let bricks = structure.bricks();
    let n = bricks.len();

    // Component labels by BFS.
    let mut label = vec![usize::MAX; n];
    let mut components = 0;
    let mut queue = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = components;
        queue.push(start);
        while let Some(i) = queue.pop() {
            for &j in graph.neighbors(i) {
                if label[j] == usize::MAX {
                    label[j] = components;
                    queue.push(j);
                }
            }
        }
        components += 1;
    }

    let mut grounded_component = vec![false; components];
    for (i, b) in bricks.iter().enumerate() {
        if b.z == 0 {
            grounded_component[label[i]] = true;
        }
    }

    let mut grounded_cover = vec![false; world.volume()];
    for (i, b) in bricks.iter().enumerate() {
        if !grounded_component[label[i]] {
            continue;
        }
        let r = b.clipped_footprint(&world);
        for x in r.x0..r.x1 {
            for y in r.y0..r.y1 {
                grounded_cover[world.index((x, y, b.z))] = true;
            }
        }
    }

    let occupied = field.occupied_count();
    let disconnected = field
        .counts
        .iter()
        .zip(&grounded_cover)
        .filter(|(&c, &g)| c > 0 && !g)
        .count();
    let conn_score = 1.0 - disconnected as f64 / occupied.max(1) as f64;
    let is_connected = n > 0 && components == 1 && grounded_component[0] && disconnected == 0;

    Connectivity {
        occupied,
        disconnected,
        conn_score,
        is_connected,
    }
}

pub fn grounded_components(structure: &BrickStructure, world: WorldConfig) -> Connectivity {
    let field = rasterize(structure, world);
    let graph = support_graph(structure, world);
    connectivity_with(structure, world, &field, &graph)
}

fn interlock_with(structure: &BrickStructure, graph: &SupportGraph) -> f64 {
    let mut elevated = 0usize;
    let mut interlocked = 0usize;
    for (i, b) in structure.iter().enumerate() {
        if b.z == 0 {
            continue;
        }
        elevated += 1;
        if graph.supports(i).count() >= 2 {
            interlocked += 1;
        }
    }
    interlocked as f64 / elevated.max(1) as f64
}

/// Fraction of non-ground bricks resting on at least two distinct bricks below.
pub fn interlock_score(structure: &BrickStructure, world: WorldConfig) -> f64 {
    interlock_with(structure, &support_graph(structure, world))
}

fn seam_coverage_with(structure: &BrickStructure, world: WorldConfig, field: &OccupancyField) -> f64 {
    let bricks = structure.bricks();
    let mut owner = vec![NO_OWNER; world.volume()];
    for (i, b) in bricks.iter().enumerate() {
        let r = b.clipped_footprint(&world);
        for x in r.x0..r.x1 {
            for y in r.y0..r.y1 {
                let k = world.index((x, y, b.z));
                if owner[k] == NO_OWNER {
                    owner[k] = i as u32;
                }
            }
        }
    }
    let layers = layers(bricks, &world);

    let mut total = 0usize;
    let mut covered = 0usize;
    for z in 0..world.dim_z.saturating_sub(1) {
        for x in 0..world.dim_x {
            for y in 0..world.dim_y {
                let a = world.index((x, y, z));
                if owner[a] == NO_OWNER {
                    continue;
                }
                let neighbors = [(x + 1, y), (x, y + 1)];
                for (nx, ny) in neighbors {
                    if nx >= world.dim_x || ny >= world.dim_y {
                        continue;
                    }
                    let b = world.index((nx, ny, z));
                    if owner[b] == NO_OWNER || owner[b] == owner[a] {
                        continue;
                    }
                    total += 1;
                    let ua = world.index((x, y, z + 1));
                    let ub = world.index((nx, ny, z + 1));
                    let is_covered = if field.counts[ua] > 1 || field.counts[ub] > 1 {
                        layers[z as usize + 1]
                            .iter()
                            .any(|(_, r)| r.contains(x, y) && r.contains(nx, ny))
                    } else {
                        owner[ua] != NO_OWNER && owner[ua] == owner[ub]
                    };
                    if is_covered {
                        covered += 1;
                    }
                }
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        covered as f64 / total as f64
    }
}

/// Fraction of same-layer brick boundaries bridged by a single brick one layer up.
///
/// A seam is a pair of 4-adjacent occupied voxels owned by different bricks,
/// where a colliding voxel is owned by its lowest-index brick. The top layer has
/// nothing above it and contributes no seams. With no seams at all the score is 1.
pub fn seam_coverage(structure: &BrickStructure, world: WorldConfig) -> f64 {
    let field = rasterize(structure, world);
    seam_coverage_with(structure, world, &field)
}

/// Every structural figure for one structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureAnalysis {
    pub n_col: usize,
    pub fully_in_bounds: bool,
    pub occupied_count: usize,
    pub disconnected_count: usize,
    pub conn_score: f64,
    pub is_connected: bool,
    pub interlock_score: f64,
    pub seam_coverage: f64,
}

/// Rasterizes once and derives every predicate from the shared field and graph.
pub fn analyze(structure: &BrickStructure, world: WorldConfig) -> (OccupancyField, StructureAnalysis) {
    let field = rasterize(structure, world);
    let graph = support_graph(structure, world);
    let conn = connectivity_with(structure, world, &field, &graph);
    let n_col = field.counts.iter().filter(|&&c| c > 1).count();
    let analysis = StructureAnalysis {
        n_col,
        fully_in_bounds: structure.fully_in_bounds(&world),
        occupied_count: conn.occupied,
        disconnected_count: conn.disconnected,
        conn_score: conn.conn_score,
        is_connected: conn.is_connected,
        interlock_score: interlock_with(structure, &graph),
        seam_coverage: seam_coverage_with(structure, world, &field),
    };
    (field, analysis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::OrientedDim;

    fn brick(h: u32, w: u32, x: u32, y: u32, z: u32) -> Brick {
        Brick::new(OrientedDim::lookup(h, w).unwrap(), x, y, z)
    }

    fn structure(bricks: &[(u32, u32, u32, u32, u32)]) -> BrickStructure {
        bricks.iter().map(|&(h, w, x, y, z)| brick(h, w, x, y, z)).collect()
    }

    fn bridge() -> BrickStructure {
        structure(&[(1, 2, 0, 0, 0), (1, 2, 0, 2, 0), (1, 4, 0, 0, 1)])
    }

    const W: WorldConfig = WorldConfig {
        dim_x: 20,
        dim_y: 20,
        dim_z: 20,
    };

    #[test]
    fn rasterize_examples() {
        let f = rasterize(&structure(&[(1, 1, 0, 0, 0), (1, 1, 0, 0, 0)]), W);
        assert_eq!(f.count((0, 0, 0)), 2);
        assert_eq!(f.total(), 2);

        let f = rasterize(&structure(&[(1, 4, 5, 6, 0)]), W);
        for y in 6..10 {
            assert_eq!(f.count((5, y, 0)), 1);
        }
        assert_eq!(f.total(), 4);

        let f = rasterize(&BrickStructure::new(), W);
        assert_eq!(f.total(), 0);
    }

    #[test]
    fn collision_examples() {
        let f = rasterize(&structure(&[(1, 1, 0, 0, 0), (1, 1, 0, 0, 0)]), W);
        assert_eq!(collision_stats(&f).n_col, 1);

        let f = rasterize(&structure(&[(2, 2, 0, 0, 0), (2, 2, 1, 1, 0)]), W);
        let c = collision_stats(&f);
        assert_eq!(c.n_col, 1);
        assert_eq!(c.colliding, vec![(1, 1, 0)]);

        let f = rasterize(&bridge(), W);
        assert_eq!(collision_stats(&f), CollisionStats { n_col: 0, colliding: vec![] });
    }

    #[test]
    fn support_graph_examples() {
        let g = support_graph(&structure(&[(1, 2, 0, 0, 0), (1, 2, 0, 0, 1)]), W);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.supports(1).collect::<Vec<_>>(), vec![0]);

        let g = support_graph(&structure(&[(1, 2, 0, 0, 0), (1, 2, 0, 0, 2)]), W);
        assert_eq!(g.edge_count(), 0);

        let g = support_graph(&bridge(), W);
        assert!(g.has_edge(2, 0));
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(0, 1));
        assert_eq!(g.supports(2).count(), 2);
        assert_eq!(g.supports(0).count(), 0);
    }

    #[test]
    fn overlap_outside_world_is_not_support() {
        // Both footprints only meet at x = 20, outside a 20-wide world.
        let s = structure(&[(1, 1, 19, 0, 0), (2, 1, 19, 0, 1), (2, 1, 20, 0, 0)]);
        let g = support_graph(&s, W);
        assert!(g.has_edge(0, 1));
        assert!(!g.has_edge(1, 2));
    }

    #[test]
    fn grounded_examples() {
        let c = grounded_components(&structure(&[(1, 1, 0, 0, 0)]), W);
        assert_eq!((c.occupied, c.disconnected, c.is_connected), (1, 0, true));

        let c = grounded_components(&structure(&[(1, 1, 0, 0, 5)]), W);
        assert_eq!((c.occupied, c.disconnected), (1, 1));
        assert_eq!(c.conn_score, 0.0);
        assert!(!c.is_connected);

        let c = grounded_components(&structure(&[(2, 2, 0, 0, 0), (1, 1, 10, 10, 3)]), W);
        assert_eq!((c.occupied, c.disconnected), (5, 1));
        assert_eq!(c.conn_score, 1.0 - 1.0 / 5.0);
        assert!(!c.is_connected);
    }

    #[test]
    fn two_grounded_towers_are_not_connected() {
        let c = grounded_components(&structure(&[(1, 1, 0, 0, 0), (1, 1, 5, 5, 0)]), W);
        assert_eq!(c.disconnected, 0);
        assert_eq!(c.conn_score, 1.0);
        assert!(!c.is_connected);
    }

    #[test]
    fn side_contact_does_not_connect() {
        // The floating brick touches the grounded one only sideways.
        let c = grounded_components(&structure(&[(1, 1, 0, 0, 0), (1, 1, 0, 0, 1), (1, 1, 1, 0, 1)]), W);
        assert_eq!(c.disconnected, 1);
    }

    #[test]
    fn interlock_examples() {
        let tower = structure(&[(1, 1, 0, 0, 0), (1, 1, 0, 0, 1), (1, 1, 0, 0, 2), (1, 1, 0, 0, 3), (1, 1, 0, 0, 4)]);
        assert_eq!(interlock_score(&tower, W), 0.0);
        assert_eq!(interlock_score(&bridge(), W), 1.0);
        assert_eq!(interlock_score(&structure(&[(2, 2, 0, 0, 0), (2, 2, 4, 4, 0)]), W), 0.0);
    }

    #[test]
    fn seam_examples() {
        assert_eq!(seam_coverage(&bridge(), W), 1.0);
        let pair = structure(&[(1, 2, 0, 0, 0), (1, 2, 0, 2, 0)]);
        assert_eq!(seam_coverage(&pair, W), 0.0);
        assert_eq!(seam_coverage(&structure(&[(2, 4, 3, 3, 0)]), W), 1.0);
    }

    #[test]
    fn seam_covered_despite_collision_above() {
        // Two bricks collide above the seam; the 1x4 alone bridges it.
        let s = structure(&[(1, 2, 0, 0, 0), (1, 2, 0, 2, 0), (1, 4, 0, 0, 1), (1, 1, 0, 1, 1)]);
        assert_eq!(seam_coverage(&s, W), 1.0);
    }

    #[test]
    fn seams_in_top_layer_are_ignored() {
        let w = WorldConfig::new(4, 4, 2).unwrap();
        let s = structure(&[(1, 2, 0, 0, 1), (1, 2, 0, 2, 1)]);
        assert_eq!(seam_coverage(&s, w), 1.0);
    }

    #[test]
    fn analyze_matches_individual_ops() {
        let s = structure(&[(2, 2, 0, 0, 0), (2, 2, 1, 1, 0), (1, 4, 0, 0, 1), (1, 1, 10, 10, 3), (2, 4, 19, 18, 0)]);
        let (field, a) = analyze(&s, W);
        assert_eq!(field, rasterize(&s, W));
        assert_eq!(a.n_col, collision_stats(&field).n_col);
        let c = grounded_components(&s, W);
        assert_eq!(a.conn_score, c.conn_score);
        assert_eq!(a.disconnected_count, c.disconnected);
        assert_eq!(a.interlock_score, interlock_score(&s, W));
        assert_eq!(a.seam_coverage, seam_coverage(&s, W));
        assert!(!a.fully_in_bounds);
    }
}
