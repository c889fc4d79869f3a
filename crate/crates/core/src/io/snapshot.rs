//! HLXF binary snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `HLXF` |
//! | 4     | `u32` version (1) |
//! | 12    | `u32` nx, ny, nz |
//! | 32    | `f64` Lx, Ly, pitch L, time |
//! | 1     | `u8` component count |
//! | 8·n·c | `f64` samples, component-major, x fastest |
//!
//! Three components hold the full velocity `u`; six hold `u` followed by
//! the full vorticity `ω`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::PhysicalField;
use crate::grid::GridSpec;

pub const MAGIC: &[u8; 4] = b"HLXF";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 12 + 32 + 1;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub velocity: PhysicalField,
    pub vorticity: Option<PhysicalField>,
}

impl Snapshot {
    pub fn grid(&self) -> &GridSpec {
        self.velocity.grid()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let g = self.grid();
        let ncomp = 3 + if self.vorticity.is_some() { 3 } else { 0 };
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len() * ncomp);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for n in [g.nx, g.ny, g.nz] {
            out.extend_from_slice(&(n as u32).to_le_bytes());
        }
        for x in [g.lx, g.ly, g.pitch, self.time] {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out.push(ncomp as u8);
        let fields = std::iter::once(&self.velocity).chain(self.vorticity.as_ref());
        for f in fields {
            for c in f.components() {
                for x in c {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Snapshot { path: path.to_path_buf(), reason };
        if bytes.len() < HEADER_LEN {
            return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(bad("missing HLXF magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let (nx, ny, nz) = (u32_at(8) as usize, u32_at(12) as usize, u32_at(16) as usize);
        let (lx, ly, pitch, time) = (f64_at(20), f64_at(28), f64_at(36), f64_at(44));
        let ncomp = bytes[52] as usize;
        if ncomp != 3 && ncomp != 6 {
            return Err(bad(format!("component count {ncomp} (expected 3 or 6)")));
        }
        if ly != lx {
            return Err(bad(format!("Ly = {ly} differs from Lx = {lx}")));
        }
        let grid = GridSpec::with_shape(nx, ny, nz, lx, pitch).map_err(|e| bad(e.to_string()))?;
        let n = grid.len();
        let want = HEADER_LEN + 8 * n * ncomp;
        if bytes.len() != want {
            return Err(bad(format!("{} bytes, expected {want}", bytes.len())));
        }
        if !time.is_finite() || time < 0.0 {
            return Err(bad(format!("time {time} must be finite and ≥ 0")));
        }
        let data: Vec<Vec<f64>> = (0..ncomp)
            .map(|c| {
                let base = HEADER_LEN + 8 * n * c;
                (0..n).map(|i| f64_at(base + 8 * i)).collect()
            })
            .collect();
        let mut it = data.into_iter();
        let velocity = PhysicalField::from_components(&grid, it.by_ref().take(3).collect())
            .map_err(|e| bad(e.to_string()))?;
        let vorticity = if ncomp == 6 {
            Some(PhysicalField::from_components(&grid, it.collect()).map_err(|e| bad(e.to_string()))?)
        } else {
            None
        };
        Ok(Snapshot { time, velocity, vorticity })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&self.to_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Snapshot {
        let g = GridSpec::with_shape(8, 8, 10, 4.0, 0.5).unwrap();
        let u = PhysicalField::vector_from_fn(&g, |p| [p[0], -p[1], p[2].sin()]);
        Snapshot { time: 1.25, vorticity: Some(u.scaled(2.0)), velocity: u }
    }

    #[test]
    fn bytes_round_trip() {
        let s = sample();
        let b = s.to_bytes();
        assert_eq!(&b[..4], b"HLXF");
        let back = Snapshot::from_bytes(&b, Path::new("mem")).unwrap();
        assert_eq!(back.time, 1.25);
        assert_eq!(back.grid(), s.grid());
        assert_eq!(back.velocity.components(), s.velocity.components());
        assert_eq!(back.vorticity.unwrap().components(), s.vorticity.unwrap().components());
    }

    #[test]
    fn rejects_corruption() {
        let mut b = sample().to_bytes();
        let p = Path::new("mem");
        assert!(Snapshot::from_bytes(&b[..b.len() - 1], p).is_err());
        b[52] = 4;
        assert!(Snapshot::from_bytes(&b, p).is_err());
        b[0] = b'X';
        assert!(Snapshot::from_bytes(&b, p).is_err());
    }
}
