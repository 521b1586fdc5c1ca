//! Binary snapshot format for a single [`SpectralField`].
//!
//! Layout (all little-endian):
//!
//! | offset | size | content                         |
//! |--------|------|---------------------------------|
//! | 0      | 4    | magic `ZKBF`                    |
//! | 4      | 2    | version `u16` (= 1)             |
//! | 6      | 2    | reserved `u16` (= 0)            |
//! | 8      | 4    | `nx` as `u32`                   |
//! | 12     | 4    | `ny` as `u32`                   |
//! | 16     | 8    | `lx` as `f64`                   |
//! | 24     | 8    | `ly` as `f64`                   |
//! | 32     | 16·nx·ny | coefficients `(re, im)` as `f64` pairs |
//!
//! Coefficients are row-major in `(ix, iy)` with FFT index order on both
//! axes (`iy` varies fastest). The dealiasing fraction is not stored;
//! readers get the default.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Result, ZkbError};
use crate::grid::GridSpec;
use crate::spectral::SpectralField;

pub const MAGIC: &[u8; 4] = b"ZKBF";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;

pub fn encode(f: &SpectralField) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(g.nx as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny as u32).to_le_bytes());
    out.extend_from_slice(&g.lx.to_le_bytes());
    out.extend_from_slice(&g.ly.to_le_bytes());
    for c in f.coeffs() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<SpectralField> {
    if bytes.len() < HEADER_LEN || &bytes[0..4] != MAGIC {
        return Err(ZkbError::Format("not a ZKBF snapshot".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(ZkbError::Format(format!("unsupported snapshot version {version}")));
    }
    let nx = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let ny = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
    let grid = GridSpec::new(nx, ny, f64_at(bytes, 16), f64_at(bytes, 24))?;
    let expected = HEADER_LEN + 16 * grid.len();
    if bytes.len() != expected {
        return Err(ZkbError::Format(format!(
            "snapshot body has {} bytes, expected {}",
            bytes.len() - HEADER_LEN,
            expected - HEADER_LEN
        )));
    }
    let coeffs = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    SpectralField::from_coeffs(grid, coeffs)
}

pub fn write(path: &Path, f: &SpectralField) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(&encode(f))?;
    file.flush()?;
    Ok(())
}

pub fn read(path: &Path) -> Result<SpectralField> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let g = GridSpec::new(16, 32, 2.0, 3.5).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, -2, Complex64::new(0.5, -0.25)).unwrap();
        let b = encode(&f);
        assert_eq!(b.len(), 32 + 16 * 512);
        assert_eq!(&b[0..4], b"ZKBF");
        assert_eq!(&b[4..8], &[1, 0, 0, 0]);
        assert_eq!(&b[8..12], &16u32.to_le_bytes());
        assert_eq!(&b[12..16], &32u32.to_le_bytes());
        assert_eq!(f64_at(&b, 16), 2.0);
        assert_eq!(f64_at(&b, 24), 3.5);
        let at = 32 + 16 * (32 + 30);
        assert_eq!(f64_at(&b, at), 0.5);
        assert_eq!(f64_at(&b, at + 8), -0.25);
        assert_eq!(decode(&b).unwrap(), f);
    }

    #[test]
    fn rejects_truncated_and_foreign() {
        let f = SpectralField::zeros(GridSpec::new(16, 16, 1.0, 1.0).unwrap());
        let b = encode(&f);
        assert!(decode(&b[..b.len() - 1]).is_err());
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(decode(&bad).is_err());
    }
}
