//! Binary snapshot files: magic "ASF1", u32 version = 1, u32 d,
//! u32 dims[d], f64 time, f64 kappa, f64 epsilon, then prod(dims) f64
//! samples row-major (last axis fastest). Everything little-endian; the
//! round trip is bit-exact.

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::PhysicalField;
use crate::grid::Grid;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"ASF1";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub time: f64,
    pub kappa: f64,
    pub epsilon: f64,
}

pub fn write_snapshot(path: &Path, field: &PhysicalField, header: &SnapshotHeader) -> Result<()> {
    let err = |e| Error::io(path.display().to_string(), e);
    let file = File::create(path).map_err(err)?;
    let mut w = BufWriter::new(file);
    let mut inner = || -> std::io::Result<()> {
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_u32::<LittleEndian>(SNAPSHOT_VERSION)?;
        w.write_u32::<LittleEndian>(field.grid().dim() as u32)?;
        for &n in field.grid().dims() {
            w.write_u32::<LittleEndian>(n as u32)?;
        }
        w.write_f64::<LittleEndian>(header.time)?;
        w.write_f64::<LittleEndian>(header.kappa)?;
        w.write_f64::<LittleEndian>(header.epsilon)?;
        for &v in field.values() {
            w.write_f64::<LittleEndian>(v)?;
        }
        w.flush()
    };
    inner().map_err(err)
}

pub fn read_snapshot(path: &Path) -> Result<(PhysicalField, SnapshotHeader)> {
    let err = |e| Error::io(path.display().to_string(), e);
    let file = File::open(path).map_err(err)?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(err)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Format(format!(
            "{}: bad magic {:?}",
            path.display(),
            magic
        )));
    }
    let version = r.read_u32::<LittleEndian>().map_err(err)?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!(
            "{}: unsupported snapshot version {version}",
            path.display()
        )));
    }
    let d = r.read_u32::<LittleEndian>().map_err(err)? as usize;
    if d != 2 && d != 3 {
        return Err(Error::Format(format!(
            "{}: dimension {d} out of range",
            path.display()
        )));
    }
    let mut dims = Vec::with_capacity(d);
    for _ in 0..d {
        dims.push(r.read_u32::<LittleEndian>().map_err(err)? as usize);
    }
    let grid = Grid::new(&dims).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let time = r.read_f64::<LittleEndian>().map_err(err)?;
    let kappa = r.read_f64::<LittleEndian>().map_err(err)?;
    let epsilon = r.read_f64::<LittleEndian>().map_err(err)?;

    let count = grid.len();
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        match r.read_f64::<LittleEndian>() {
            Ok(v) => values.push(v),
            Err(_) => {
                return Err(Error::Format(format!(
                    "{}: truncated payload, expected {count} samples got {}",
                    path.display(),
                    values.len()
                )))
            }
        }
    }
    // anything left over means the header lied about the dims
    let mut probe = [0u8; 1];
    if r.read(&mut probe).map_err(err)? != 0 {
        return Err(Error::Format(format!(
            "{}: trailing bytes beyond declared payload",
            path.display()
        )));
    }
    let field = PhysicalField::new(grid, values)?;
    Ok((
        field,
        SnapshotHeader {
            time,
            kappa,
            epsilon,
        },
    ))
}
