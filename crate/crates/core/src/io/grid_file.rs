//! Binary grid files.
//!
//! Little-endian layout:
//!
//! ```text
//! "HTG1"
//! u8 dimension, u8 factor, u8 orientation, u8 flags (1: mask, 2: explicit starts)
//! u32 extent[3], u32 tree count, u32 field count
//! per axis: u32 length, f64 values
//! per present tree: u32 i, j, k; u64 start; u64 bit count; refinement bits
//! mask (flag 1): u64 bit count, bits
//! per field: u32 name length, UTF-8 name, u64 value count, f64 values
//! ```
//!
//! Refinement bits list the vertices in breadth-first order, 1 for strict
//! ones. Bit strings are packed least significant bit first and padded to a
//! whole byte.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use bitvec::vec::BitVec;

use crate::grid::HyperTreeGrid;
use crate::indexing::child_count;
use crate::tree::HyperTree;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"HTG1";
const FLAG_MASK: u8 = 1;
const FLAG_STARTS: u8 = 2;

pub fn write_grid(grid: &HyperTreeGrid, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_grid_to(grid, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<HyperTreeGrid> {
    read_grid_from(&mut BufReader::new(File::open(path)?))
}

pub fn write_grid_to<W: Write>(grid: &HyperTreeGrid, w: &mut W) -> Result<()> {
    if !grid.is_finalized() {
        return Err(Error::NotFinalized("writing a grid file"));
    }
    let mut flags = 0;
    if grid.has_mask() {
        flags |= FLAG_MASK;
    }
    if grid.has_explicit_starts() {
        flags |= FLAG_STARTS;
    }
    w.write_all(MAGIC)?;
    w.write_all(&[grid.dimension() as u8, grid.factor() as u8, grid.orientation() as u8, flags])?;
    for e in grid.extent() {
        put_u32(w, e as u32)?;
    }
    put_u32(w, grid.tree_count() as u32)?;
    put_u32(w, grid.field_count() as u32)?;
    for axis in 0..3 {
        let c = grid.coordinates(axis);
        put_u32(w, c.len() as u32)?;
        for &x in c {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    for (slot, tree) in grid.trees() {
        if !tree.is_breadth_first() {
            return Err(Error::Format(format!(
                "tree {:?} is not numbered breadth-first and cannot be stored as refinement bits",
                grid.coords_of(slot)
            )));
        }
        for c in grid.coords_of(slot) {
            put_u32(w, c as u32)?;
        }
        put_u64(w, grid.start_of(slot))?;
        put_bits(w, tree.refinement_bits(), tree.vertex_count() as u64)?;
    }
    if let Some(mask) = grid.mask() {
        put_bits(w, mask.iter().by_vals(), mask.len() as u64)?;
    }
    for name in grid.field_names() {
        let values = grid.field(name)?;
        put_u32(w, name.len() as u32)?;
        w.write_all(name.as_bytes())?;
        put_u64(w, values.len() as u64)?;
        for &x in values {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_grid_from<R: Read>(r: &mut R) -> Result<HyperTreeGrid> {
    read_inner(r).map_err(|e| match e {
        Error::Io(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            Error::Format("truncated payload".into())
        }
        e => e,
    })
}

fn read_inner<R: Read>(r: &mut R) -> Result<HyperTreeGrid> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, not a grid file".into()));
    }
    let mut head = [0u8; 4];
    r.read_exact(&mut head)?;
    let [d, f, orientation, flags] = head.map(usize::from);
    if flags & !3 != 0 {
        return Err(Error::Format(format!("unknown flags {flags:#x}")));
    }
    let mut extent = [0usize; 3];
    for e in extent.iter_mut() {
        *e = get_u32(r)? as usize;
    }
    let tree_count = get_u32(r)? as usize;
    let field_count = get_u32(r)? as usize;
    let mut coordinates: [Vec<f64>; 3] = Default::default();
    for c in coordinates.iter_mut() {
        let n = get_u32(r)? as usize;
        // a coordinate list never holds more than one value per cell plus one
        if n > extent.iter().max().copied().unwrap_or(0) + 1 {
            return Err(Error::Format(format!("{n} coordinates for extent {extent:?}")));
        }
        *c = (0..n).map(|_| get_f64(r)).collect::<Result<_>>()?;
    }
    let mut grid = HyperTreeGrid::new(d, f, extent, coordinates, orientation)?;
    let slots = grid.slot_count();
    if tree_count > slots {
        return Err(Error::Format(format!("{tree_count} trees for {slots} slots")));
    }
    let leaves_per_split = child_count(d, f) as u64 - 1;
    let mut trees: Vec<Option<HyperTree>> = vec![None; slots];
    let mut starts = vec![0u64; slots];
    for _ in 0..tree_count {
        let coords = [get_u32(r)? as usize, get_u32(r)? as usize, get_u32(r)? as usize];
        let slot = grid.slot_of(coords).map_err(|_| {
            Error::Format(format!("tree {coords:?} lies outside extent {extent:?}"))
        })?;
        if trees[slot].is_some() {
            return Err(Error::Format(format!("tree {coords:?} is stored twice")));
        }
        starts[slot] = get_u64(r)?;
        let bits = get_bits(r)?;
        let strict = bits.count_ones() as u64;
        if bits.len() as u64 != 1 + strict * (leaves_per_split + 1) {
            return Err(Error::Format(format!(
                "tree {coords:?}: {} refinement bits with {strict} strict vertices, expected {}",
                bits.len(),
                1 + strict * (leaves_per_split + 1)
            )));
        }
        let tree = HyperTree::from_refinement_bits(d, f, bits.iter().by_vals())
            .map_err(|e| Error::Format(format!("tree {coords:?}: {e}")))?;
        trees[slot] = Some(tree);
    }
    let coordinates = std::array::from_fn(|a| grid.coordinates(a).to_vec());
    grid = HyperTreeGrid::from_trees(d, f, extent, coordinates, orientation, trees)?;
    if flags as u8 & FLAG_STARTS != 0 {
        grid.finalize_with_starts(starts)?;
    } else {
        grid.finalize();
        for (slot, _) in grid.trees() {
            if grid.start_of(slot) != starts[slot] {
                return Err(Error::Format(format!(
                    "tree {:?} starts at {} but the cumulative rule gives {}",
                    grid.coords_of(slot),
                    starts[slot],
                    grid.start_of(slot)
                )));
            }
        }
    }
    if flags as u8 & FLAG_MASK != 0 {
        let mask = get_bits(r)?;
        grid.set_mask(mask)?;
    }
    for _ in 0..field_count {
        let len = get_u32(r)? as usize;
        let mut name = vec![0u8; len];
        r.read_exact(&mut name)?;
        let name = String::from_utf8(name).map_err(|_| Error::Format("field name is not UTF-8".into()))?;
        let n = get_u64(r)?;
        if n != grid.vertex_total() {
            return Err(Error::Format(format!(
                "field {name} holds {n} values for {} vertices",
                grid.vertex_total()
            )));
        }
        let values = (0..n).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
        grid.add_field(name, values)?;
    }
    Ok(grid)
}

fn put_u32<W: Write>(w: &mut W, x: u32) -> Result<()> {
    Ok(w.write_all(&x.to_le_bytes())?)
}

fn put_u64<W: Write>(w: &mut W, x: u64) -> Result<()> {
    Ok(w.write_all(&x.to_le_bytes())?)
}

fn put_bits<W: Write>(w: &mut W, bits: impl Iterator<Item = bool>, len: u64) -> Result<()> {
    put_u64(w, len)?;
    let mut bytes = vec![0u8; len.div_ceil(8) as usize];
    for (i, b) in bits.take(len as usize).enumerate() {
        bytes[i / 8] |= (b as u8) << (i % 8);
    }
    Ok(w.write_all(&bytes)?)
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn get_bits<R: Read>(r: &mut R) -> Result<BitVec> {
    let len = get_u64(r)?;
    if len > u32::MAX as u64 * 8 {
        return Err(Error::Format(format!("bit string of {len} bits")));
    }
    let mut bytes = Vec::new();
    r.take(len.div_ceil(8)).read_to_end(&mut bytes)?;
    if bytes.len() as u64 != len.div_ceil(8) {
        return Err(Error::Format("truncated payload".into()));
    }
    Ok((0..len as usize).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect())
}
