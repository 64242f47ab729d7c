//! Custom multiplier tables: magic "MSY1", u32 version, u32 d,
//! u32 dims[d], then for each mode in row-major order d complex values as
//! little-endian f64 pairs (re, im). Tables are validated against the
//! divergence-free and reality invariants at load time; every downstream
//! guarantee depends on those two properties.

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::symbols::{MultiplierSymbol, SymbolKind};

pub const SYMBOL_MAGIC: &[u8; 4] = b"MSY1";
pub const SYMBOL_VERSION: u32 = 1;

pub fn write_symbol_file(path: &Path, symbol: &MultiplierSymbol) -> Result<()> {
    let err = |e| Error::io(path.display().to_string(), e);
    let file = File::create(path).map_err(err)?;
    let mut w = BufWriter::new(file);
    let grid = symbol.grid();
    let d = grid.dim();
    let mut inner = || -> std::io::Result<()> {
        w.write_all(SYMBOL_MAGIC)?;
        w.write_u32::<LittleEndian>(SYMBOL_VERSION)?;
        w.write_u32::<LittleEndian>(d as u32)?;
        for &n in grid.dims() {
            w.write_u32::<LittleEndian>(n as u32)?;
        }
        for flat in 0..grid.len() {
            for j in 0..d {
                let c = symbol.component(j)[flat];
                w.write_f64::<LittleEndian>(c.re)?;
                w.write_f64::<LittleEndian>(c.im)?;
            }
        }
        w.flush()
    };
    inner().map_err(err)
}

/// Load and validate a custom symbol table. The grid in the file must match
/// `expected` when provided.
pub fn read_symbol_file(path: &Path, expected: Option<&Grid>) -> Result<MultiplierSymbol> {
    let err = |e| Error::io(path.display().to_string(), e);
    let file = File::open(path).map_err(err)?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(err)?;
    if &magic != SYMBOL_MAGIC {
        return Err(Error::Format(format!(
            "{}: bad magic {:?}",
            path.display(),
            magic
        )));
    }
    let version = r.read_u32::<LittleEndian>().map_err(err)?;
    if version != SYMBOL_VERSION {
        return Err(Error::Format(format!(
            "{}: unsupported symbol version {version}",
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
    if let Some(exp) = expected {
        if exp != &grid {
            return Err(Error::Format(format!(
                "{}: symbol grid {:?} does not match configured grid {:?}",
                path.display(),
                grid.dims(),
                exp.dims()
            )));
        }
    }
    let mut components = vec![vec![Complex64::default(); grid.len()]; d];
    for flat in 0..grid.len() {
        for component in components.iter_mut() {
            let re = r.read_f64::<LittleEndian>().map_err(|_| {
                Error::Format(format!("{}: truncated symbol table", path.display()))
            })?;
            let im = r.read_f64::<LittleEndian>().map_err(|_| {
                Error::Format(format!("{}: truncated symbol table", path.display()))
            })?;
            component[flat] = Complex64::new(re, im);
        }
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe).map_err(err)? != 0 {
        return Err(Error::Format(format!(
            "{}: trailing bytes beyond declared table",
            path.display()
        )));
    }
    let symbol = MultiplierSymbol::new(grid, SymbolKind::Custom, components)?;
    symbol.validate()?;
    Ok(symbol)
}
