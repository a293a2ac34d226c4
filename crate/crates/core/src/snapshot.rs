//! `NSF1` field snapshots: one ASCII header line
//! `NSF1 n=<n> L=<float> t=<float> components=3`, a newline, then `3·n³`
//! little-endian `f64` physical samples, component-major and x-fastest.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use crate::error::{NslabError, Result};
use crate::field::{PhysicalVector, SpectralVectorField};
use crate::grid::Grid3;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: PhysicalVector,
}

pub fn header(grid: &Grid3, time: f64) -> String {
    format!("NSF1 n={} L={} t={} components=3\n", grid.n(), grid.length(), time)
}

pub fn write_snapshot(mut w: impl Write, field: &PhysicalVector, time: f64) -> Result<()> {
    w.write_all(header(field.grid(), time).as_bytes())?;
    let mut buf = Vec::with_capacity(3 * field.grid().len() * 8);
    for c in field.components() {
        for v in c {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

fn parse_header(line: &str) -> Result<(usize, f64, f64)> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("NSF1") {
        return Err(NslabError::Parse("missing NSF1 magic".into()));
    }
    let mut n = None;
    let mut l = None;
    let mut t = None;
    let mut comps = None;
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| NslabError::Parse(format!("malformed header token {p:?}")))?;
        let bad = |_| NslabError::Parse(format!("bad value in {p:?}"));
        match k {
            "n" => n = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "L" => l = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
            "t" => t = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
            "components" => comps = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            _ => return Err(NslabError::Parse(format!("unknown header key {k:?}"))),
        }
    }
    if comps != Some(3) {
        return Err(NslabError::Parse("components must be 3".into()));
    }
    match (n, l, t) {
        (Some(n), Some(l), Some(t)) => Ok((n, l, t)),
        _ => Err(NslabError::Parse("header missing n, L or t".into())),
    }
}

pub fn read_snapshot(r: impl Read) -> Result<Snapshot> {
    let mut reader = std::io::BufReader::new(r);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let (n, l, time) = parse_header(line.trim_end_matches('\n'))?;
    let grid = Grid3::new(n, l)?;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let expected = 3 * grid.len() * 8;
    if bytes.len() != expected {
        return Err(NslabError::DimensionMismatch {
            expected: 3 * grid.len(),
            actual: bytes.len() / 8,
        });
    }
    let vals: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let m = grid.len();
    let field = PhysicalVector::new(
        grid,
        [vals[..m].to_vec(), vals[m..2 * m].to_vec(), vals[2 * m..].to_vec()],
    )?;
    Ok(Snapshot { time, field })
}

pub fn save(path: &Path, field: &SpectralVectorField, time: f64) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_snapshot(std::io::BufWriter::new(f), &field.backward(), time)
}

pub fn load(path: &Path) -> Result<(SpectralVectorField, f64)> {
    let s = read_snapshot(std::fs::File::open(path)?)?;
    Ok((SpectralVectorField::forward(&s.field), s.time))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_exact() {
        let g = Grid3::new(8, 2.5).unwrap();
        let f = PhysicalVector::from_fn(g, |x| [x[0], 2.0 * x[1], -x[2]]);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.75).unwrap();
        let head = b"NSF1 n=8 L=2.5 t=0.75 components=3\n";
        assert_eq!(&buf[..head.len()], head);
        assert_eq!(buf.len(), head.len() + 3 * 512 * 8);
        // component-major, x-fastest: second sample is x index 1 of u_1
        let second = f64::from_le_bytes(buf[head.len() + 8..head.len() + 16].try_into().unwrap());
        assert_eq!(second, g.centered_coord(1));
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.time, 0.75);
        assert_eq!(back.field, f);
    }

    #[test]
    fn rejects_truncated_payload_and_bad_magic() {
        let g = Grid3::new(8, 1.0).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &PhysicalVector::zeros(g), 0.0).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(read_snapshot(buf.as_slice()).is_err());
        assert!(read_snapshot(&b"NSF2 n=8 L=1 t=0 components=3\n"[..]).is_err());
        assert!(read_snapshot(&b"NSF1 n=8 L=1 t=0 components=2\n"[..]).is_err());
    }
}
