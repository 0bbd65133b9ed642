//! Raw field snapshots: little-endian `f64` data in row-major order (last
//! axis fastest) plus a `key: value` text header next to it.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ndarray::{ArrayD, IxDyn};

use crate::params::Grid;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub dim: usize,
    pub cells: Vec<usize>,
    pub extents: Vec<f64>,
    pub t: f64,
    pub field: String,
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

impl SnapshotHeader {
    fn render(&self) -> String {
        let join = |xs: Vec<String>| xs.join(" ");
        format!(
            "dim: {}\ncells: {}\nextents: {}\ntime: {:.17e}\nfield: {}\nencoding: f64-le\norder: row-major\n",
            self.dim,
            join(self.cells.iter().map(|c| c.to_string()).collect()),
            join(self.extents.iter().map(|e| format!("{e:.17e}")).collect()),
            self.t,
            self.field
        )
    }

    fn parse(text: &str) -> io::Result<Self> {
        let mut dim = None;
        let mut cells = None;
        let mut extents = None;
        let mut t = None;
        let mut field = None;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| invalid(format!("bad header line {line:?}")))?;
            let value = value.trim();
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| invalid(format!("bad number {s:?}")))
            };
            match key.trim() {
                "dim" => dim = Some(value.parse::<usize>().map_err(|_| invalid("bad dim"))?),
                "cells" => {
                    cells = Some(
                        value
                            .split_whitespace()
                            .map(|c| c.parse::<usize>().map_err(|_| invalid("bad cells")))
                            .collect::<io::Result<Vec<_>>>()?,
                    )
                }
                "extents" => {
                    extents = Some(
                        value
                            .split_whitespace()
                            .map(num)
                            .collect::<io::Result<Vec<_>>>()?,
                    )
                }
                "time" => t = Some(num(value)?),
                "field" => field = Some(value.to_string()),
                "encoding" if value == "f64-le" => {}
                "order" if value == "row-major" => {}
                other => return Err(invalid(format!("unexpected header entry {other}: {value}"))),
            }
        }
        let header = SnapshotHeader {
            dim: dim.ok_or_else(|| invalid("missing dim"))?,
            cells: cells.ok_or_else(|| invalid("missing cells"))?,
            extents: extents.ok_or_else(|| invalid("missing extents"))?,
            t: t.ok_or_else(|| invalid("missing time"))?,
            field: field.ok_or_else(|| invalid("missing field"))?,
        };
        if header.cells.len() != header.dim || header.extents.len() != header.dim {
            return Err(invalid("cells/extents disagree with dim"));
        }
        Ok(header)
    }
}

/// Writes `<stem>.bin` and `<stem>.hdr` into `dir`; returns the data path.
pub fn write_snapshot(
    dir: &Path,
    stem: &str,
    field_name: &str,
    field: &ArrayD<f64>,
    grid: &Grid,
    t: f64,
) -> io::Result<PathBuf> {
    if field.shape() != grid.cells() {
        return Err(invalid("field shape does not match grid"));
    }
    let header = SnapshotHeader {
        dim: grid.dim(),
        cells: grid.cells().to_vec(),
        extents: grid.extents().to_vec(),
        t,
        field: field_name.to_string(),
    };
    let mut bytes = Vec::with_capacity(8 * field.len());
    for x in field.iter() {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    let data = dir.join(format!("{stem}.bin"));
    fs::write(&data, bytes)?;
    fs::write(dir.join(format!("{stem}.hdr")), header.render())?;
    Ok(data)
}

/// Reads a snapshot given the path of its `.bin` file.
pub fn read_snapshot(data: &Path) -> io::Result<(SnapshotHeader, ArrayD<f64>)> {
    let header = SnapshotHeader::parse(&fs::read_to_string(data.with_extension("hdr"))?)?;
    let bytes = fs::read(data)?;
    let expected: usize = header.cells.iter().product();
    if bytes.len() != 8 * expected {
        return Err(invalid(format!(
            "expected {} bytes, found {}",
            8 * expected,
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let array =
        ArrayD::from_shape_vec(IxDyn(&header.cells), values).map_err(|e| invalid(e.to_string()))?;
    Ok((header, array))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(&[1.0, 2.0], &[4, 6]).unwrap();
        let f = g.sample(|x| x[0] + 10.0 * x[1]);
        let path = write_snapshot(dir.path(), "u_000", "u", &f, &g, 0.25).unwrap();
        let (h, back) = read_snapshot(&path).unwrap();
        assert_eq!(back, f);
        assert_eq!(h.cells, vec![4, 6]);
        assert_eq!(h.extents, vec![1.0, 2.0]);
        assert_eq!(h.t, 0.25);
        assert_eq!(h.field, "u");
        // last axis fastest
        let bytes = std::fs::read(&path).unwrap();
        let second = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
        assert_eq!(second, f[[0, 1]]);
    }

    #[test]
    fn truncated_data_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::unit(1, 4).unwrap();
        let path = write_snapshot(dir.path(), "v", "v", &g.constant(1.0), &g, 0.0).unwrap();
        std::fs::write(&path, [0u8; 8]).unwrap();
        assert!(read_snapshot(&path).is_err());
    }
}
