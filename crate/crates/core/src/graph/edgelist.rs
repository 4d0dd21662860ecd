use std::io::BufRead;

use crate::error::{Error, Result};

/// Parses whitespace-separated `src dst` pairs, one per line. Blank lines
/// and lines starting with `#` are skipped. Returns the edges and
/// `max ID + 1` (0 for an empty list).
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<(Vec<(u32, u32)>, usize)> {
    let mut edges = Vec::new();
    let mut max_id: Option<u32> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut next = |what: &str| -> Result<u32> {
            let tok = fields.next().ok_or_else(|| Error::Malformed {
                context: "edge list",
                detail: format!("line {}: missing {what}", lineno + 1),
            })?;
            tok.parse::<u32>().map_err(|_| Error::Malformed {
                context: "edge list",
                detail: format!("line {}: {tok:?} is not a 32-bit node ID", lineno + 1),
            })
        };
        let src = next("source")?;
        let dst = next("destination")?;
        if fields.next().is_some() {
            return Err(Error::Malformed {
                context: "edge list",
                detail: format!("line {}: expected exactly two fields", lineno + 1),
            });
        }
        max_id = Some(max_id.unwrap_or(0).max(src).max(dst));
        edges.push((src, dst));
    }
    let n = max_id.map_or(0, |m| m as usize + 1);
    Ok((edges, n))
}
