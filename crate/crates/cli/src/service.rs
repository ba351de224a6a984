//! Newline-delimited JSON reward service.
//!
//! Each request line carries an `id`, a `completion`, and exactly one of
//! `target_voxels` (base64 zlib codec) or `target_points` (point-token text).
//! Each produces exactly one response line carrying the same `id`. Responses
//! may come back out of order when several workers run.

use std::io::{self, BufRead, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};

use brickrl_core::dataset::decode_target_voxels;
use brickrl_core::parser::parse_pointcloud;
use brickrl_core::reward::{score_completion, RewardBreakdown};
use brickrl_core::{OccupancyGrid, WorldConfig};
use crossbeam_channel::bounded;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardRequest {
    pub id: String,
    pub completion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_voxels: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_points: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardResponse {
    pub id: String,
    pub total: f64,
    pub r_col: f64,
    pub r_shape: f64,
    pub r_inter: f64,
    pub r_conn: f64,
    pub iou: f64,
    pub n_col: usize,
    pub parse_failed: bool,
    pub feasible: bool,
    pub in_bounds: bool,
    pub brick_count: usize,
}

impl RewardResponse {
    pub fn new(id: String, r: &RewardBreakdown) -> Self {
        Self {
            id,
            total: r.total,
            r_col: r.r_col,
            r_shape: r.r_shape,
            r_inter: r.r_inter,
            r_conn: r.r_conn,
            iou: r.iou,
            n_col: r.n_col,
            parse_failed: r.parse_failed,
            feasible: r.feasible,
            in_bounds: r.in_bounds,
            brick_count: r.brick_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadRequest,
    BadTargetEncoding,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub id: Option<String>,
    pub error_code: ErrorCode,
    pub message: String,
}

/// Resolves whichever target form a record carries.
pub fn resolve_target(
    voxels: Option<&str>,
    points: Option<&str>,
    world: WorldConfig,
) -> Result<OccupancyGrid, (ErrorCode, String)> {
    match (voxels, points) {
        (Some(v), None) => decode_target_voxels(v, world).map_err(|e| (ErrorCode::BadTargetEncoding, e.to_string())),
        (None, Some(p)) => parse_pointcloud(p, world).map_err(|e| (ErrorCode::BadTargetEncoding, e.to_string())),
        (Some(_), Some(_)) => Err((
            ErrorCode::BadRequest,
            "exactly one of target_voxels or target_points is allowed".into(),
        )),
        (None, None) => Err((ErrorCode::BadRequest, "missing target_voxels or target_points".into())),
    }
}

fn error_line(id: Option<String>, error_code: ErrorCode, message: String) -> String {
    serde_json::to_string(&ErrorResponse { id, error_code, message }).expect("serializable")
}

/// Scores one request line and renders the response line (without newline).
pub fn handle_line(line: &[u8], world: WorldConfig) -> String {
    let value: serde_json::Value = match serde_json::from_slice(line) {
        Ok(v) => v,
        Err(e) => return error_line(None, ErrorCode::BadRequest, format!("invalid JSON: {e}")),
    };
    let id = value.get("id").and_then(|v| v.as_str()).map(str::to_owned);
    let req: RewardRequest = match serde_json::from_value(value) {
        Ok(r) => r,
        Err(e) => return error_line(id, ErrorCode::BadRequest, e.to_string()),
    };
    let target = match resolve_target(req.target_voxels.as_deref(), req.target_points.as_deref(), world) {
        Ok(t) => t,
        Err((code, msg)) => return error_line(Some(req.id), code, msg),
    };
    match score_completion(&req.completion, &target, world) {
        Ok(r) => serde_json::to_string(&RewardResponse::new(req.id, &r)).expect("serializable"),
        Err(e) => error_line(Some(req.id), ErrorCode::BadTargetEncoding, e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServeOptions {
    pub threads: usize,
    pub world: WorldConfig,
}

impl ServeOptions {
    /// Requests buffered between the reader and the workers, and responses
    /// between the workers and the writer.
    fn queue_depth(&self) -> usize {
        self.threads.max(1) * 4
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ServeStats {
    pub requests: usize,
}

/// Serves requests from `reader` until end of input, then flushes `writer`.
///
/// Blank lines are ignored. A line that is not a valid request yields an error
/// response and the stream continues.
pub fn serve_stream<R, W>(mut reader: R, mut writer: W, opts: ServeOptions) -> io::Result<ServeStats>
where
    R: BufRead,
    W: Write + Send,
{
    let depth = opts.queue_depth();
    let (req_tx, req_rx) = bounded::<Vec<u8>>(depth);
    let (resp_tx, resp_rx) = bounded::<String>(depth);
    let requests = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..opts.threads.max(1) {
            let req_rx = req_rx.clone();
            let resp_tx = resp_tx.clone();
            scope.spawn(move || {
                for line in req_rx {
                    if resp_tx.send(handle_line(&line, opts.world)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(req_rx);
        drop(resp_tx);

        let writer_thread = scope.spawn(move || -> io::Result<()> {
            while let Ok(resp) = resp_rx.recv() {
                writer.write_all(resp.as_bytes())?;
                writer.write_all(b"\n")?;
                if resp_rx.is_empty() {
                    writer.flush()?;
                }
            }
            writer.flush()
        });

        let mut read_result = Ok(());
        let mut buf = Vec::new();
        loop {
            buf.clear();
            match reader.read_until(b'\n', &mut buf) {
                Ok(0) => break,
                Ok(_) => {}
                Err(e) => {
                    read_result = Err(e);
                    break;
                }
            }
            let line = buf.strip_suffix(b"\n").unwrap_or(&buf);
            let line = line.strip_suffix(b"\r").unwrap_or(line);
            if line.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            requests.fetch_add(1, Ordering::Relaxed);
            if req_tx.send(line.to_vec()).is_err() {
                break;
            }
        }
        drop(req_tx);

        let write_result = writer_thread.join().expect("writer thread panicked");
        read_result.and(write_result)
    })?;

    Ok(ServeStats {
        requests: requests.into_inner(),
    })
}

/// Accepts connections forever; each connection is an independent stream.
pub fn serve_tcp(listener: TcpListener, opts: ServeOptions) -> io::Result<()> {
    for conn in listener.incoming() {
        let stream = match conn {
            Ok(s) => s,
            Err(e) => {
                log::warn!("accept failed: {e}");
                continue;
            }
        };
        let peer = stream.peer_addr().ok();
        std::thread::spawn(move || {
            let result = stream
                .try_clone()
                .and_then(|read_half| serve_stream(io::BufReader::new(read_half), stream, opts));
            match result {
                Ok(stats) => log::info!("{peer:?}: served {} requests", stats.requests),
                Err(e) => log::warn!("{peer:?}: connection ended with error: {e}"),
            }
        });
    }
    Ok(())
}
