//! Text layer for brick sequences and point-cloud tokens.
//!
//! Brick grammar:
//!
//! ```text
//! brick      := INT "x" INT WS* "(" INT WS* "," WS* INT WS* "," WS* INT ")"
//! completion := header_line? (brick_line | inline_list | blank)*
//! ```
//!
//! A completion may carry one brick per line or a comma-separated inline list,
//! optionally preceded by a `### Bricks:` header.

use serde::Serialize;

use crate::error::Error;
use crate::grid::OccupancyGrid;
use crate::world::{Brick, BrickStructure, OrientedDim, WorldConfig, PROMPT_ORDER};

pub const BRICKS_HEADER: &str = "### Bricks:";
pub const POINT_CLOUD_HEADER: &str = "### Input Point Cloud:";

/// How [`serialize_structure`] lays out bricks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    OnePerLine,
    CommaInline,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedLine {
    /// 1-based line number in the completion.
    pub line: usize,
    pub text: String,
    pub reason: String,
}

/// Diagnostics from [`parse_structure`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub parsed_ok: bool,
    pub brick_count: usize,
    pub malformed_lines: Vec<MalformedLine>,
    pub empty_response: bool,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Self {
            bytes: s.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        match self.peek() {
            Some(found) if found == c => {
                self.pos += 1;
                Ok(())
            }
            Some(found) => Err(format!(
                "expected '{}' at column {}, found '{}'",
                c as char,
                self.pos + 1,
                char_at(self.bytes, self.pos).unwrap_or(found as char)
            )),
            None => Err(format!("expected '{}' at end of input", c as char)),
        }
    }

    fn int(&mut self) -> Result<u64, String> {
        if self.peek() == Some(b'-') {
            return Err(format!("negative value at column {}", self.pos + 1));
        }
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected integer at column {}", start + 1));
        }
        // Digits are ASCII, so the slice is valid UTF-8.
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or_default();
        digits
            .parse::<u64>()
            .map_err(|_| format!("integer out of range at column {}", start + 1))
    }

    fn finish(&self) -> Result<(), String> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(format!("unexpected trailing text at column {}", self.pos + 1))
        }
    }

    /// `"(" INT WS* "," WS* INT WS* "," WS* INT ")"`
    fn triple(&mut self) -> Result<(u64, u64, u64), String> {
        self.expect(b'(')?;
        let x = self.int()?;
        self.skip_ws();
        self.expect(b',')?;
        self.skip_ws();
        let y = self.int()?;
        self.skip_ws();
        self.expect(b',')?;
        self.skip_ws();
        let z = self.int()?;
        self.expect(b')')?;
        Ok((x, y, z))
    }
}

fn char_at(bytes: &[u8], pos: usize) -> Option<char> {
    std::str::from_utf8(&bytes[pos..])
        .ok()
        .and_then(|s| s.chars().next())
}

fn to_u32(v: u64) -> Result<u32, String> {
    u32::try_from(v).map_err(|_| format!("integer {v} out of range"))
}

/// Parses one brick token such as `1x4 (5,6,0)`.
pub fn parse_brick_line(text: &str) -> Result<Brick, Error> {
    let mut cur = Cursor::new(text.trim());
    let malformed = Error::MalformedLine;

    let h = cur.int().map_err(malformed)?;
    cur.expect(b'x').map_err(malformed)?;
    let w = cur.int().map_err(malformed)?;
    cur.skip_ws();
    let (x, y, z) = cur.triple().map_err(malformed)?;
    cur.finish().map_err(malformed)?;

    let (x, y, z) = (
        to_u32(x).map_err(malformed)?,
        to_u32(y).map_err(malformed)?,
        to_u32(z).map_err(malformed)?,
    );
    let dim = match (u32::try_from(h), u32::try_from(w)) {
        (Ok(h), Ok(w)) => OrientedDim::lookup(h, w)?,
        _ => return Err(Error::MalformedLine(format!("dimension {h}x{w} out of range"))),
    };
    Ok(Brick::new(dim, x, y, z))
}

/// Splits on commas that sit outside parentheses.
fn split_top_level(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, b) in line.bytes().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth = depth.saturating_sub(1),
            b',' if depth == 0 => {
                out.push(&line[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&line[start..]);
    out
}

/// Parses a full completion. Never fails: every problem lands in the report.
pub fn parse_structure(text: &str) -> (BrickStructure, ParseReport) {
    let mut structure = BrickStructure::new();
    let mut malformed_lines = Vec::new();
    let empty_response = text.trim().is_empty();
    let mut seen_content = false;

    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        if first && trimmed == BRICKS_HEADER {
            continue;
        }

        let mut failure = None;
        for token in split_top_level(trimmed) {
            match parse_brick_line(token) {
                Ok(b) => structure.push(b),
                Err(e) => {
                    if failure.is_none() {
                        failure = Some(e.to_string());
                    }
                }
            }
        }
        if let Some(reason) = failure {
            malformed_lines.push(MalformedLine {
                line: i + 1,
                text: line.to_string(),
                reason,
            });
        }
    }

    let brick_count = structure.len();
    let report = ParseReport {
        parsed_ok: brick_count >= 1 && malformed_lines.is_empty(),
        brick_count,
        malformed_lines,
        empty_response,
    };
    (structure, report)
}

pub fn serialize_structure(structure: &BrickStructure, layout: Layout) -> String {
    let sep = match layout {
        Layout::OnePerLine => "\n",
        Layout::CommaInline => ", ",
    };
    let mut out = String::new();
    for (i, b) in structure.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        out.push_str(&b.to_string());
    }
    out
}

/// Occupied voxels as `(x,y,z), (x,y,z), ...` in ascending lexicographic order.
pub fn serialize_pointcloud(grid: &OccupancyGrid) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for (i, (x, y, z)) in grid.occupied().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "({x},{y},{z})");
    }
    out
}

pub fn parse_pointcloud(text: &str, world: WorldConfig) -> Result<OccupancyGrid, Error> {
    let mut grid = OccupancyGrid::new(world);
    let text = text.trim();
    if text.is_empty() {
        return Ok(grid);
    }
    for token in split_top_level(text) {
        let token = token.trim();
        let mut cur = Cursor::new(token);
        let (x, y, z) = cur
            .triple()
            .and_then(|t| cur.finish().map(|_| t))
            .map_err(|reason| Error::MalformedPointToken(format!("{token:?}: {reason}")))?;
        let in_world = x < world.dim_x as u64 && y < world.dim_y as u64 && z < world.dim_z as u64;
        if !in_world {
            return Err(Error::OutOfWorldCoordinate { x, y, z });
        }
        grid.set((x as u32, y as u32, z as u32), true);
    }
    Ok(grid)
}

/// The fixed instruction block that precedes the point list.
pub fn prompt_preamble() -> String {
    let dims: Vec<String> = PROMPT_ORDER.iter().map(|d| d.to_string()).collect();
    format!(
        "Create a LEGO model of the input 3D point cloud.\n\
         Format your response as a list of bricks: <brick dimensions> <brick position>, where the brick position is (x,y,z).\n\
         Allowed brick dimensions are {}.\n\
         All bricks are 1 unit tall.\n\
         \n\
         {POINT_CLOUD_HEADER}\n",
        dims.join(", ")
    )
}

pub fn build_prompt(grid: &OccupancyGrid) -> String {
    let mut out = prompt_preamble();
    out.push_str(&serialize_pointcloud(grid));
    out
}
