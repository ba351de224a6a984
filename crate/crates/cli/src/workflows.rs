//! File-level operations: target loading, pair evaluation and fixture generation.

use std::fs::{self, File};
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use brickrl_core::construct::{legalize, random_target, ConstructorOptions, TargetParams};
use brickrl_core::dataset::{decode_target_voxels, encode_target_voxels, LayoutRecord};
use brickrl_core::metrics::{sample_metrics, SampleMetrics};
use brickrl_core::parser::{parse_pointcloud, serialize_structure, Layout};
use brickrl_core::{OccupancyGrid, WorldConfig};
use serde::{Deserialize, Serialize};

use crate::service::resolve_target;

/// Reads a target file holding either point-token text or the base64 codec.
///
/// Text that is empty or starts with `(` is read as points; anything else is
/// decoded as the codec.
pub fn parse_target_text(text: &str, world: WorldConfig) -> Result<OccupancyGrid> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed.starts_with('(') {
        parse_pointcloud(trimmed, world).map_err(|e| anyhow!("point list: {e}"))
    } else {
        decode_target_voxels(trimmed, world).map_err(|e| anyhow!("voxel codec: {e}"))
    }
}

pub fn load_target(path: &Path, world: WorldConfig) -> Result<OccupancyGrid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_target_text(&text, world).with_context(|| format!("decoding target {}", path.display()))
}

/// One evaluation sample: a completion and its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub completion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_voxels: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_points: Option<String>,
    #[serde(default)]
    pub wall_time_s: f64,
}

pub fn read_pairs<R: BufRead>(input: R) -> Result<Vec<PairRecord>> {
    let mut pairs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.context("reading pairs")?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).with_context(|| format!("pairs line {}", i + 1))?;
        pairs.push(rec);
    }
    Ok(pairs)
}

fn pair_metrics(pair: &PairRecord, world: WorldConfig) -> Result<SampleMetrics> {
    let target = resolve_target(pair.target_voxels.as_deref(), pair.target_points.as_deref(), world)
        .map_err(|(_, msg)| anyhow!(msg))?;
    Ok(sample_metrics(&pair.completion, &target, world, pair.wall_time_s)?)
}

/// Computes per-sample metrics in input order, splitting the work over
/// `threads` scoped threads.
pub fn evaluate_pairs(pairs: &[PairRecord], world: WorldConfig, threads: usize) -> Result<Vec<SampleMetrics>> {
    if pairs.is_empty() {
        bail!("no samples to evaluate");
    }
    let chunk = pairs.len().div_ceil(threads.max(1));
    let results: Vec<Result<Vec<SampleMetrics>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = pairs
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                scope.spawn(move || {
                    part.iter()
                        .enumerate()
                        .map(|(i, p)| {
                            pair_metrics(p, world).with_context(|| {
                                let label = p.id.clone().unwrap_or_else(|| format!("#{}", c * chunk + i + 1));
                                format!("sample {label}")
                            })
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("eval worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(pairs.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureOptions {
    pub count: usize,
    pub seed: u64,
    pub target: TargetParams,
    pub constructor: ConstructorOptions,
}

/// Writes `layouts.ndjson` (convert input) and `pairs.ndjson` (eval input)
/// built from seeded random targets and their legalized layouts.
pub fn gen_fixtures(dir: &Path, opts: &FixtureOptions, world: WorldConfig) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let open = |name: &str| -> Result<BufWriter<File>> {
        let path = dir.join(name);
        Ok(BufWriter::new(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        ))
    };
    let mut layouts = open("layouts.ndjson")?;
    let mut pairs = open("pairs.ndjson")?;
    for i in 0..opts.count {
        let target = random_target(opts.seed.wrapping_add(i as u64), &opts.target, world);
        let structure = legalize(&target, &opts.constructor);
        let bricks = serialize_structure(&structure, Layout::OnePerLine);
        let id = format!("fixture_{i:05}");
        let layout = LayoutRecord {
            id: Some(id.clone()),
            bricks: bricks.clone(),
        };
        let pair = PairRecord {
            id: Some(id),
            completion: bricks,
            target_voxels: Some(encode_target_voxels(&target)),
            target_points: None,
            wall_time_s: 0.0,
        };
        writeln!(layouts, "{}", serde_json::to_string(&layout)?)?;
        writeln!(pairs, "{}", serde_json::to_string(&pair)?)?;
    }
    layouts.flush()?;
    pairs.flush()?;
    Ok(())
}
