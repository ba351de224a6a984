//! The four-term physical reward: collision penalty, shape IoU, interlocking and
//! connectivity. The two structural terms only pay out for feasible structures,
//! meaning collision-free and fully inside the world.

use serde::Serialize;

use crate::analysis::{analyze, StructureAnalysis};
use crate::error::Error;
use crate::grid::OccupancyGrid;
use crate::parser::parse_structure;
use crate::world::{BrickStructure, WorldConfig};

pub const COLLISION_FLOOR: f64 = -10.0;
pub const COLLISION_WEIGHT: f64 = 2.0;
pub const SHAPE_WEIGHT: f64 = 5.0;
pub const INTERLOCK_WEIGHT: f64 = 3.0;
pub const CONNECTIVITY_WEIGHT: f64 = 2.0;

/// Total assigned to empty or malformed completions.
pub const FAILED_TOTAL: f64 = -10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewardBreakdown {
    pub r_col: f64,
    pub r_shape: f64,
    pub r_inter: f64,
    pub r_conn: f64,
    pub total: f64,
    pub parse_failed: bool,
    pub feasible: bool,
    pub iou: f64,
    pub n_col: usize,
    pub in_bounds: bool,
    pub brick_count: usize,
}

impl RewardBreakdown {
    pub fn failed() -> Self {
        Self {
            r_col: COLLISION_FLOOR,
            r_shape: 0.0,
            r_inter: 0.0,
            r_conn: 0.0,
            total: FAILED_TOTAL,
            parse_failed: true,
            feasible: false,
            iou: 0.0,
            n_col: 0,
            in_bounds: false,
            brick_count: 0,
        }
    }
}

pub fn reward_collision(n_col: usize) -> f64 {
    // Saturate before converting so huge counts cannot lose precision.
    let n = n_col.min(1 << 20) as f64;
    (-COLLISION_WEIGHT * n).max(COLLISION_FLOOR)
}

/// Voxel IoU. Two empty grids score 0.
pub fn iou(generated: &OccupancyGrid, target: &OccupancyGrid) -> Result<f64, Error> {
    target.check_same_world(generated)?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&g, &t) in generated.cells().iter().zip(target.cells()) {
        inter += (g && t) as usize;
        union += (g || t) as usize;
    }
    Ok(if union == 0 { 0.0 } else { inter as f64 / union as f64 })
}

/// Returns `(reward, iou)`.
pub fn reward_shape(generated: &OccupancyGrid, target: &OccupancyGrid) -> Result<(f64, f64), Error> {
    let iou = iou(generated, target)?;
    Ok((SHAPE_WEIGHT * iou, iou))
}

pub fn reward_interlock(s_inter: f64, feasible: bool) -> f64 {
    if feasible {
        INTERLOCK_WEIGHT * s_inter
    } else {
        0.0
    }
}

pub fn reward_connectivity(s_conn: f64, feasible: bool) -> f64 {
    if feasible {
        CONNECTIVITY_WEIGHT * s_conn
    } else {
        0.0
    }
}

/// Scores an already parsed structure. Also returns the analysis it computed.
pub fn score_structure(
    structure: &BrickStructure,
    target: &OccupancyGrid,
    world: WorldConfig,
) -> Result<(RewardBreakdown, StructureAnalysis), Error> {
    if target.world() != world {
        return Err(Error::DimensionMismatch {
            expected: world,
            found: target.world(),
        });
    }
    let (field, a) = analyze(structure, world);
    let (r_shape, iou) = reward_shape(&field.occupied(), target)?;
    let feasible = a.n_col == 0 && a.fully_in_bounds;
    let r_col = reward_collision(a.n_col);
    let r_inter = reward_interlock(a.interlock_score, feasible);
    let r_conn = reward_connectivity(a.conn_score, feasible);
    let breakdown = RewardBreakdown {
        r_col,
        r_shape,
        r_inter,
        r_conn,
        total: r_col + r_shape + r_inter + r_conn,
        parse_failed: false,
        feasible,
        iou,
        n_col: a.n_col,
        in_bounds: a.fully_in_bounds,
        brick_count: structure.len(),
    };
    Ok((breakdown, a))
}

/// Parses and scores a model completion against a target grid.
///
/// Empty or malformed completions yield [`RewardBreakdown::failed`]. The only
/// error is a target grid sized for a different world.
pub fn score_completion(
    completion: &str,
    target: &OccupancyGrid,
    world: WorldConfig,
) -> Result<RewardBreakdown, Error> {
    if target.world() != world {
        return Err(Error::DimensionMismatch {
            expected: world,
            found: target.world(),
        });
    }
    let (structure, report) = parse_structure(completion);
    if !report.parsed_ok {
        return Ok(RewardBreakdown::failed());
    }
    score_structure(&structure, target, world).map(|(b, _)| b)
}
