//! Per-sample evaluation metrics and corpus aggregates.
//!
//! Denominators: `parse_rate`, `coll_free_rate` and `avg_time_s` use every
//! evaluated sample; all other aggregates use parsed samples only and are
//! absent when nothing parsed.

use std::io::Write;

use serde::Serialize;

use crate::error::Error;
use crate::grid::OccupancyGrid;
use crate::parser::parse_structure;
use crate::reward::score_structure;
use crate::world::WorldConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleMetrics {
    pub parsed: bool,
    pub collision_free: bool,
    pub n_col: usize,
    pub voxel_iou: f64,
    pub conn_ratio: f64,
    pub is_connected: bool,
    pub interlock: f64,
    pub seam_cov: f64,
    pub in_bounds: bool,
    pub brick_count: usize,
    pub wall_time_s: f64,
}

impl SampleMetrics {
    pub fn unparsed(wall_time_s: f64) -> Self {
        Self {
            parsed: false,
            collision_free: false,
            n_col: 0,
            voxel_iou: 0.0,
            conn_ratio: 0.0,
            is_connected: false,
            interlock: 0.0,
            seam_cov: 0.0,
            in_bounds: false,
            brick_count: 0,
            wall_time_s,
        }
    }
}

pub fn sample_metrics(
    completion: &str,
    target: &OccupancyGrid,
    world: WorldConfig,
    wall_time_s: f64,
) -> Result<SampleMetrics, Error> {
    if target.world() != world {
        return Err(Error::DimensionMismatch {
            expected: world,
            found: target.world(),
        });
    }
    let (structure, report) = parse_structure(completion);
    if !report.parsed_ok {
        return Ok(SampleMetrics::unparsed(wall_time_s));
    }
    let (reward, a) = score_structure(&structure, target, world)?;
    Ok(SampleMetrics {
        parsed: true,
        collision_free: a.n_col == 0,
        n_col: a.n_col,
        voxel_iou: reward.iou,
        conn_ratio: a.conn_score,
        is_connected: a.is_connected,
        interlock: a.interlock_score,
        seam_cov: a.seam_coverage,
        in_bounds: a.fully_in_bounds,
        brick_count: structure.len(),
        wall_time_s,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub n_total: usize,
    pub n_parsed: usize,
    pub parse_rate: f64,
    pub coll_free_rate: f64,
    pub mean_coll_voxels: Option<f64>,
    pub mean_voxel_iou: Option<f64>,
    pub conn_ratio: Option<f64>,
    pub connected_rate: Option<f64>,
    pub interlock_score: Option<f64>,
    pub seam_cov: Option<f64>,
    pub in_bounds_rate: Option<f64>,
    pub mean_bricks: Option<f64>,
    pub avg_time_s: f64,
}

/// Mean with values summed in sorted order, so the result does not depend on
/// sample order.
fn mean<I: IntoIterator<Item = f64>>(values: I) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v.iter().sum::<f64>() / v.len() as f64)
}

fn rate(count: usize, of: usize) -> f64 {
    count as f64 / of as f64
}

pub fn aggregate(samples: &[SampleMetrics]) -> Result<AggregateReport, Error> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = samples.len();
    let parsed: Vec<&SampleMetrics> = samples.iter().filter(|s| s.parsed).collect();
    let p = parsed.len();
    let collision_free = parsed.iter().filter(|s| s.collision_free).count();

    let over_parsed = |f: fn(&SampleMetrics) -> f64| mean(parsed.iter().map(|s| f(s)));
    let rate_parsed = |f: fn(&SampleMetrics) -> bool| {
        (p > 0).then(|| rate(parsed.iter().filter(|s| f(s)).count(), p))
    };

    Ok(AggregateReport {
        n_total: n,
        n_parsed: p,
        parse_rate: rate(p, n),
        coll_free_rate: rate(collision_free, n),
        mean_coll_voxels: over_parsed(|s| s.n_col as f64),
        mean_voxel_iou: over_parsed(|s| s.voxel_iou),
        conn_ratio: over_parsed(|s| s.conn_ratio),
        connected_rate: rate_parsed(|s| s.is_connected),
        interlock_score: over_parsed(|s| s.interlock),
        seam_cov: over_parsed(|s| s.seam_cov),
        in_bounds_rate: rate_parsed(|s| s.in_bounds),
        mean_bricks: over_parsed(|s| s.brick_count as f64),
        avg_time_s: mean(samples.iter().map(|s| s.wall_time_s)).unwrap_or(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TabularText,
    StructuredRecords,
}

#[derive(Serialize)]
struct SampleRecord<'a> {
    record: &'static str,
    index: usize,
    #[serde(flatten)]
    metrics: &'a SampleMetrics,
}

#[derive(Serialize)]
struct AggregateRecord<'a> {
    record: &'static str,
    #[serde(flatten)]
    report: &'a AggregateReport,
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

fn write_table<W: Write>(out: &mut W, header: &[&str], row: &[String]) -> std::io::Result<()> {
    let widths: Vec<usize> = header.iter().zip(row).map(|(h, v)| h.len().max(v.len())).collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))
}

/// Writes the report. Tabular output follows the usual results-table column
/// order; records output is one JSON object per sample followed by one
/// aggregate object.
pub fn emit_report<W: Write>(
    out: &mut W,
    report: &AggregateReport,
    samples: &[SampleMetrics],
    format: ReportFormat,
) -> Result<(), Error> {
    match format {
        ReportFormat::TabularText => {
            write_table(
                out,
                &[
                    "Coll.-Free Rate",
                    "Voxel IoU",
                    "Conn. Ratio",
                    "Interlock. Score",
                    "Seam Cov.",
                    "Mean Bricks",
                    "Avg. Time",
                ],
                &[
                    cell(Some(report.coll_free_rate)),
                    cell(report.mean_voxel_iou),
                    cell(report.conn_ratio),
                    cell(report.interlock_score),
                    cell(report.seam_cov),
                    cell(report.mean_bricks),
                    cell(Some(report.avg_time_s)),
                ],
            )?;
            writeln!(out)?;
            write_table(
                out,
                &["N", "Parse Rate", "Mean Coll. Voxels", "Connected Rate", "In-Bounds Rate"],
                &[
                    report.n_total.to_string(),
                    cell(Some(report.parse_rate)),
                    cell(report.mean_coll_voxels),
                    cell(report.connected_rate),
                    cell(report.in_bounds_rate),
                ],
            )?;
        }
        ReportFormat::StructuredRecords => {
            for (index, metrics) in samples.iter().enumerate() {
                let rec = SampleRecord {
                    record: "sample",
                    index,
                    metrics,
                };
                serde_json::to_writer(&mut *out, &rec).map_err(std::io::Error::from)?;
                writeln!(out)?;
            }
            let rec = AggregateRecord {
                record: "aggregate",
                report,
            };
            serde_json::to_writer(&mut *out, &rec).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn render_report(report: &AggregateReport, samples: &[SampleMetrics], format: ReportFormat) -> Vec<u8> {
    let mut buf = Vec::new();
    emit_report(&mut buf, report, samples, format).expect("writing to a Vec cannot fail");
    buf
}
