//! Brute-force reference implementations. These work on explicit cell sets and
//! must not call into the analysis module they check.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use brickrl_core::{Brick, BrickStructure, OccupancyGrid, WorldConfig};

/// In-world footprint cells of a brick, by enumeration.
pub fn cells(b: &Brick, world: &WorldConfig) -> HashSet<(u32, u32)> {
    let mut out = HashSet::new();
    if b.z >= world.dim_z {
        return out;
    }
    for u in b.x as u64..b.x as u64 + b.dim.h() as u64 {
        for v in b.y as u64..b.y as u64 + b.dim.w() as u64 {
            if u < world.dim_x as u64 && v < world.dim_y as u64 {
                out.insert((u as u32, v as u32));
            }
        }
    }
    out
}

pub fn counts(s: &BrickStructure, world: &WorldConfig) -> HashMap<(u32, u32, u32), u32> {
    let mut m = HashMap::new();
    for b in s {
        for (u, v) in cells(b, world) {
            *m.entry((u, v, b.z)).or_insert(0) += 1;
        }
    }
    m
}

pub fn n_col(s: &BrickStructure, world: &WorldConfig) -> usize {
    counts(s, world).values().filter(|&&c| c > 1).count()
}

fn touches(a: &HashSet<(u32, u32)>, b: &HashSet<(u32, u32)>) -> bool {
    a.iter().any(|c| b.contains(c))
}

pub fn interlock(s: &BrickStructure, world: &WorldConfig) -> f64 {
    let bricks = s.bricks();
    let fp: Vec<_> = bricks.iter().map(|b| cells(b, world)).collect();
    let mut elevated = 0;
    let mut hits = 0;
    for (i, bi) in bricks.iter().enumerate() {
        if bi.z == 0 {
            continue;
        }
        elevated += 1;
        let supports = bricks
            .iter()
            .enumerate()
            .filter(|(j, bj)| bj.z + 1 == bi.z && touches(&fp[i], &fp[*j]))
            .count();
        if supports >= 2 {
            hits += 1;
        }
    }
    hits as f64 / (elevated.max(1)) as f64
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let p = self.0[i];
        if p == i {
            return i;
        }
        let r = self.find(p);
        self.0[i] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// `(|O|, |D|, conn_score, is_connected)` via union-find over all brick pairs.
pub fn connectivity(s: &BrickStructure, world: &WorldConfig) -> (usize, usize, f64, bool) {
    let bricks = s.bricks();
    let n = bricks.len();
    let fp: Vec<_> = bricks.iter().map(|b| cells(b, world)).collect();
    let mut uf = UnionFind((0..n).collect());
    for i in 0..n {
        for j in 0..n {
            if bricks[i].z + 1 == bricks[j].z && touches(&fp[i], &fp[j]) {
                uf.union(i, j);
            }
        }
    }
    let grounded_roots: HashSet<usize> = (0..n).filter(|&i| bricks[i].z == 0).map(|i| uf.find(i)).collect();
    let mut occupied = HashSet::new();
    let mut grounded = HashSet::new();
    for i in 0..n {
        let g = grounded_roots.contains(&uf.find(i));
        for &(u, v) in &fp[i] {
            occupied.insert((u, v, bricks[i].z));
            if g {
                grounded.insert((u, v, bricks[i].z));
            }
        }
    }
    let d = occupied.difference(&grounded).count();
    let roots: HashSet<usize> = (0..n).map(|i| uf.find(i)).collect();
    let connected = n > 0 && roots.len() == 1 && !grounded_roots.is_empty() && d == 0;
    (occupied.len(), d, 1.0 - d as f64 / occupied.len().max(1) as f64, connected)
}

pub fn iou(a: &OccupancyGrid, b: &OccupancyGrid) -> f64 {
    let sa: HashSet<_> = a.occupied().collect();
    let sb: HashSet<_> = b.occupied().collect();
    let union = sa.union(&sb).count();
    if union == 0 {
        0.0
    } else {
        sa.intersection(&sb).count() as f64 / union as f64
    }
}

pub fn seam_coverage(s: &BrickStructure, world: &WorldConfig) -> f64 {
    let bricks = s.bricks();
    let fp: Vec<_> = bricks.iter().map(|b| cells(b, world)).collect();
    let mut owner: HashMap<(u32, u32, u32), usize> = HashMap::new();
    for (i, b) in bricks.iter().enumerate() {
        for &(u, v) in &fp[i] {
            owner.entry((u, v, b.z)).or_insert(i);
        }
    }
    let (mut total, mut covered) = (0, 0);
    for (&(u, v, z), &o) in &owner {
        if z + 1 >= world.dim_z {
            continue;
        }
        for (nu, nv) in [(u + 1, v), (u, v + 1)] {
            match owner.get(&(nu, nv, z)) {
                Some(&o2) if o2 != o => {
                    total += 1;
                    let bridged = bricks
                        .iter()
                        .enumerate()
                        .any(|(k, b)| b.z == z + 1 && fp[k].contains(&(u, v)) && fp[k].contains(&(nu, nv)));
                    if bridged {
                        covered += 1;
                    }
                }
                _ => {}
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        covered as f64 / total as f64
    }
}
