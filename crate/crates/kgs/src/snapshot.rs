//! Binary field snapshots and their JSON sidecars.
//!
//! A snapshot stores the spectral coefficients of one field:
//! magic bytes `KGSF`, a `u16` format version, a `u16` dimension, `u32`
//! per-axis sizes, then little-endian `f64` (re, im) pairs in row-major
//! lattice order.  A sidecar file at `<path>.json` carries the box length,
//! the role of the field, and free-form provenance so a snapshot is
//! self-describing.

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: [u8; 4] = *b"KGSF";
const VERSION: u16 = 1;

/// Metadata stored next to the binary coefficient file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    /// Physical box length of the periodic domain.
    pub length: f64,
    /// What the field is (e.g. "psi_final", "phi_initial").
    pub role: String,
    /// Free-form description of how the field was produced.
    pub provenance: String,
}

/// Path of the JSON sidecar belonging to a snapshot file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

/// Write a field snapshot and its sidecar.
pub fn write_snapshot(path: &Path, field: &ComplexField, role: &str, provenance: &str) -> Result<()> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(8 + 4 * grid.dim() + 16 * grid.len());
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dim() as u16).to_le_bytes());
    for _ in 0..grid.dim() {
        buf.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    }
    for c in field.coeffs() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;

    let sidecar = Sidecar {
        length: grid.length(),
        role: role.to_string(),
        provenance: provenance.to_string(),
    };
    let json = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(sidecar_path(path), json)?;
    Ok(())
}

/// Read a field snapshot together with its sidecar.
pub fn read_snapshot(path: &Path) -> Result<(ComplexField, Sidecar)> {
    let sidecar: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;

    let mut file = std::fs::File::open(path)?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf)?;
    let mut cursor = 0usize;
    let mut take = |len: usize| -> Result<&[u8]> {
        let end = cursor.checked_add(len).filter(|&e| e <= buf.len()).ok_or_else(|| {
            Error::InvalidField(format!("snapshot {} is truncated", path.display()))
        })?;
        let slice = &buf[cursor..end];
        cursor = end;
        Ok(slice)
    };

    if take(4)? != MAGIC {
        return Err(Error::InvalidField(format!(
            "{} is not a field snapshot (bad magic bytes)",
            path.display()
        )));
    }
    let version = u16::from_le_bytes(take(2)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::InvalidField(format!(
            "unsupported snapshot version {version} (expected {VERSION})"
        )));
    }
    let dim = u16::from_le_bytes(take(2)?.try_into().unwrap()) as usize;
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidField(format!("snapshot dimension {dim} out of range")));
    }
    let mut sizes = Vec::with_capacity(dim);
    for _ in 0..dim {
        sizes.push(u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize);
    }
    if sizes.iter().any(|&s| s != sizes[0]) {
        return Err(Error::InvalidField(format!(
            "snapshot axes must have equal sizes, got {sizes:?}"
        )));
    }
    let grid = Grid::new(dim, sizes[0], sidecar.length)?;
    let mut coeffs = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(take(8)?.try_into().unwrap());
        let im = f64::from_le_bytes(take(8)?.try_into().unwrap());
        coeffs.push(Complex64::new(re, im));
    }
    if cursor != buf.len() {
        return Err(Error::InvalidField(format!(
            "snapshot {} has {} trailing bytes",
            path.display(),
            buf.len() - cursor
        )));
    }
    Ok((ComplexField::from_coeffs(grid, coeffs)?, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::testutil::random_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_preserves_coefficients_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(2, 8, 3.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_field(grid, &mut rng);
        let path = dir.path().join("field.kgsf");
        write_snapshot(&path, &f, "psi_final", "unit test").unwrap();

        let (g, sidecar) = read_snapshot(&path).unwrap();
        assert_eq!(g.grid(), f.grid());
        assert_eq!(g.coeffs(), f.coeffs());
        assert_eq!(sidecar.role, "psi_final");
        assert_eq!(sidecar.length, 3.5);
    }

    #[test]
    fn header_layout_is_as_documented() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::standard(3, 4).unwrap();
        let f = ComplexField::zero(grid);
        let path = dir.path().join("zero.kgsf");
        write_snapshot(&path, &f, "zero", "layout test").unwrap();

        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[0..4], b"KGSF");
        assert_eq!(u16::from_le_bytes(bytes[4..6].try_into().unwrap()), 1);
        assert_eq!(u16::from_le_bytes(bytes[6..8].try_into().unwrap()), 3);
        for axis in 0..3 {
            let off = 8 + 4 * axis;
            assert_eq!(u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()), 4);
        }
        assert_eq!(bytes.len(), 8 + 12 + 16 * grid.len());
        assert!(bytes[20..].iter().all(|&b| b == 0));
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::standard(1, 8).unwrap();
        let f = ComplexField::zero(grid);
        let path = dir.path().join("f.kgsf");
        write_snapshot(&path, &f, "zero", "corruption test").unwrap();

        let good = std::fs::read(&path).unwrap();

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        std::fs::write(&path, &bad_magic).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::InvalidField(_))));

        let truncated = &good[..good.len() - 4];
        std::fs::write(&path, truncated).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::InvalidField(_))));

        let mut trailing = good.clone();
        trailing.extend_from_slice(&[0u8; 8]);
        std::fs::write(&path, &trailing).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::InvalidField(_))));

        std::fs::remove_file(sidecar_path(&path)).unwrap();
        std::fs::write(&path, &good).unwrap();
        assert!(read_snapshot(&path).is_err());
    }
}
