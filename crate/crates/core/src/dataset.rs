//! Paired point-cloud / brick-sequence records and the `target_voxels` codec.
//!
//! Codec layout: one byte per voxel (0 or 1) in x-major order
//! `idx = (x * dim_y + y) * dim_z + z`, zlib-framed DEFLATE, then standard
//! padded base64.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use flate2::read::ZlibDecoder;
use flate2::write::ZlibEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::analysis::analyze;
use crate::error::{CodecError, Error};
use crate::grid::OccupancyGrid;
use crate::parser::{build_prompt, parse_structure, serialize_structure, Layout};
use crate::world::{BrickStructure, WorldConfig};

pub const SYSTEM_MESSAGE: &str = "You are a helpful assistant.";

pub fn encode_target_voxels(grid: &OccupancyGrid) -> String {
    let raw: Vec<u8> = grid.cells().iter().map(|&c| c as u8).collect();
    let mut enc = ZlibEncoder::new(Vec::new(), Compression::default());
    enc.write_all(&raw).expect("in-memory write");
    let compressed = enc.finish().expect("in-memory write");
    STANDARD.encode(compressed)
}

pub fn decode_target_voxels(encoded: &str, world: WorldConfig) -> Result<OccupancyGrid, CodecError> {
    let compressed = STANDARD
        .decode(encoded.trim())
        .map_err(|e| CodecError::BadBase64(e.to_string()))?;
    let expected = world.volume();
    let mut raw = Vec::with_capacity(expected);
    // One byte past the expected size is enough to detect an oversized payload.
    ZlibDecoder::new(compressed.as_slice())
        .take(expected as u64 + 1)
        .read_to_end(&mut raw)
        .map_err(|e| CodecError::BadCompression(e.to_string()))?;
    if raw.len() != expected {
        return Err(CodecError::BadLength {
            expected,
            found: raw.len(),
        });
    }
    let mut cells = Vec::with_capacity(expected);
    for (index, &value) in raw.iter().enumerate() {
        match value {
            0 => cells.push(false),
            1 => cells.push(true),
            _ => return Err(CodecError::BadValue { index, value }),
        }
    }
    Ok(OccupancyGrid::from_cells(world, cells).expect("length checked"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftRecord {
    pub system: String,
    pub user: String,
    pub assistant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrpoRecord {
    pub system: String,
    pub user: String,
    pub target_voxels: String,
}

/// Rejects layouts that are not usable as training demonstrations and returns
/// their occupancy.
fn feasible_occupancy(structure: &BrickStructure, world: WorldConfig) -> Result<OccupancyGrid, Error> {
    if structure.is_empty() {
        return Err(Error::InfeasibleStructure("structure is empty".into()));
    }
    let (field, a) = analyze(structure, world);
    if !a.fully_in_bounds {
        return Err(Error::InfeasibleStructure("brick outside the world".into()));
    }
    if a.n_col > 0 {
        return Err(Error::InfeasibleStructure(format!("{} colliding voxels", a.n_col)));
    }
    Ok(field.occupied())
}

pub fn build_sft_record(structure: &BrickStructure, world: WorldConfig) -> Result<SftRecord, Error> {
    let grid = feasible_occupancy(structure, world)?;
    Ok(SftRecord {
        system: SYSTEM_MESSAGE.to_string(),
        user: build_prompt(&grid),
        assistant: serialize_structure(structure, Layout::OnePerLine),
    })
}

pub fn build_grpo_record(structure: &BrickStructure, world: WorldConfig) -> Result<GrpoRecord, Error> {
    let grid = feasible_occupancy(structure, world)?;
    Ok(GrpoRecord {
        system: SYSTEM_MESSAGE.to_string(),
        user: build_prompt(&grid),
        target_voxels: encode_target_voxels(&grid),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvertMode {
    Sft,
    Grpo,
}

/// One input layout: a brick-sequence text, optionally with an id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub bricks: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConvertStats {
    pub converted: usize,
    pub skipped: usize,
}

fn convert_line(line: &str, mode: ConvertMode, world: WorldConfig) -> Result<String, String> {
    let rec: LayoutRecord = serde_json::from_str(line).map_err(|e| format!("bad record: {e}"))?;
    let (structure, report) = parse_structure(&rec.bricks);
    if !report.parsed_ok {
        return Err(format!(
            "brick text did not parse ({} bricks, {} malformed lines)",
            report.brick_count,
            report.malformed_lines.len()
        ));
    }
    let json = match mode {
        ConvertMode::Sft => build_sft_record(&structure, world).map(|r| serde_json::to_string(&r)),
        ConvertMode::Grpo => build_grpo_record(&structure, world).map(|r| serde_json::to_string(&r)),
    };
    json.map_err(|e| e.to_string())?.map_err(|e| e.to_string())
}

/// Streams newline-delimited [`LayoutRecord`]s into SFT or GRPO records, one
/// output line per converted input, in input order. Unusable records are
/// logged and skipped.
pub fn convert_corpus<R: BufRead, W: Write>(
    input: R,
    mut output: W,
    mode: ConvertMode,
    world: WorldConfig,
) -> Result<ConvertStats, Error> {
    let mut stats = ConvertStats::default();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match convert_line(&line, mode, world) {
            Ok(json) => {
                output.write_all(json.as_bytes())?;
                output.write_all(b"\n")?;
                stats.converted += 1;
            }
            Err(reason) => {
                log::warn!("skipping record on line {}: {reason}", i + 1);
                stats.skipped += 1;
            }
        }
    }
    output.flush()?;
    Ok(stats)
}

pub fn convert_corpus_file(
    input: &Path,
    output: &Path,
    mode: ConvertMode,
    world: WorldConfig,
) -> Result<ConvertStats, Error> {
    let reader = BufReader::new(File::open(input)?);
    let writer = BufWriter::new(File::create(output)?);
    convert_corpus(reader, writer, mode, world)
}
