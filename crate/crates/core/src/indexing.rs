//! Child index map, neighborhood cursor encodings and supercursor traversal
//! tables.
//!
//! Children of a cell are ranked lexicographically with axis 0 varying
//! fastest, so `child_index(c) = c[0] + c[1]*f + c[2]*f^2`. Neighborhood
//! cursors are ranked the same way after shifting their offsets from
//! `{-1,0,1}` to `{0,1,2}`; the Moore center is therefore `(3^d - 1) / 2`.
//! The Von Neumann neighborhood keeps the offsets of L1 norm at most one, in
//! the same order, which puts its center at index `d`.

use std::sync::OnceLock;

use crate::{Error, Result};

/// Largest number of children of one cell (`3^3`).
pub const MAX_CHILDREN: usize = 27;
/// Largest number of cursors in a supercursor (Moore, `d = 3`).
pub const MAX_CURSORS: usize = 27;
/// Largest number of corners of one cell (`2^3`).
pub const MAX_CORNERS: usize = 8;

pub(crate) fn check_dimension(dimension: usize) -> Result<()> {
    if (1..=3).contains(&dimension) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dimension))
    }
}

pub(crate) fn check_factor(factor: usize) -> Result<()> {
    if (2..=3).contains(&factor) {
        Ok(())
    } else {
        Err(Error::InvalidFactor(factor))
    }
}

/// Number of children of a strict node, `f^d`.
pub fn child_count(dimension: usize, factor: usize) -> usize {
    factor.pow(dimension as u32)
}

/// Number of corners of a cell, `2^d`.
pub fn corner_count(dimension: usize) -> usize {
    1 << dimension
}

/// Child coordinates `(c_0, .., c_{d-1})`, each in `[0, f)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChildCoords {
    coords: [u8; 3],
    dimension: u8,
}

impl ChildCoords {
    pub fn new(dimension: usize, factor: usize, coords: &[usize]) -> Result<Self> {
        check_dimension(dimension)?;
        check_factor(factor)?;
        if coords.len() != dimension || coords.iter().any(|&c| c >= factor) {
            return Err(Error::InvalidChildCoords {
                coords: coords.to_vec(),
                dimension,
                factor,
            });
        }
        let mut c = [0u8; 3];
        for (dst, &src) in c.iter_mut().zip(coords) {
            *dst = src as u8;
        }
        Ok(Self {
            coords: c,
            dimension: dimension as u8,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension as usize
    }

    pub fn get(&self, axis: usize) -> usize {
        self.coords[axis] as usize
    }

    pub fn to_vec(&self) -> Vec<usize> {
        (0..self.dimension()).map(|a| self.get(a)).collect()
    }
}

/// Lexicographic rank of child coordinates.
pub fn child_index(dimension: usize, factor: usize, coords: &[usize]) -> Result<usize> {
    let c = ChildCoords::new(dimension, factor, coords)?;
    Ok(rank(factor, &c.to_vec()))
}

/// Inverse of [`child_index`].
pub fn child_coords(dimension: usize, factor: usize, index: usize) -> Result<ChildCoords> {
    check_dimension(dimension)?;
    check_factor(factor)?;
    let count = child_count(dimension, factor);
    if index >= count {
        return Err(Error::IndexOutOfRange {
            what: "child",
            index,
            count,
        });
    }
    let c = unrank(dimension, factor, index);
    ChildCoords::new(dimension, factor, &c[..dimension])
}

#[inline]
pub(crate) fn rank(base: usize, digits: &[usize]) -> usize {
    digits.iter().rev().fold(0, |acc, &c| acc * base + c)
}

#[inline]
pub(crate) fn unrank(dimension: usize, base: usize, mut index: usize) -> [usize; 3] {
    let mut c = [0usize; 3];
    for slot in c.iter_mut().take(dimension) {
        *slot = index % base;
        index /= base;
    }
    c
}

/// Neighborhood tracked by a supercursor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NeighborhoodKind {
    /// Cells sharing a face (plus the center): `2d + 1` cursors.
    VonNeumann,
    /// Cells sharing any corner (plus the center): `3^d` cursors.
    Moore,
}

impl NeighborhoodKind {
    pub const ALL: [NeighborhoodKind; 2] = [NeighborhoodKind::VonNeumann, NeighborhoodKind::Moore];

    pub fn cursor_count(self, dimension: usize) -> usize {
        match self {
            NeighborhoodKind::VonNeumann => 2 * dimension + 1,
            NeighborhoodKind::Moore => 3usize.pow(dimension as u32),
        }
    }

    pub fn center(self, dimension: usize) -> usize {
        match self {
            NeighborhoodKind::VonNeumann => dimension,
            NeighborhoodKind::Moore => (3usize.pow(dimension as u32) - 1) / 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NeighborhoodKind::VonNeumann => "von-neumann",
            NeighborhoodKind::Moore => "moore",
        }
    }
}

impl std::str::FromStr for NeighborhoodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "von-neumann" | "vonneumann" | "vn" => Ok(NeighborhoodKind::VonNeumann),
            "moore" => Ok(NeighborhoodKind::Moore),
            _ => Err(Error::InvalidParameter(format!("unknown neighborhood `{s}`"))),
        }
    }
}

/// Offsets of one neighborhood, in cursor order. Unused axes are zero.
#[derive(Clone, Debug)]
pub(crate) struct Offsets {
    offsets: Vec<[i8; 3]>,
}

fn moore_offset(dimension: usize, index: usize) -> [i8; 3] {
    let c = unrank(dimension, 3, index);
    let mut w = [0i8; 3];
    for a in 0..dimension {
        w[a] = c[a] as i8 - 1;
    }
    w
}

fn build_offsets(kind: NeighborhoodKind, dimension: usize) -> Offsets {
    let moore = (0..3usize.pow(dimension as u32)).map(|i| moore_offset(dimension, i));
    let offsets = match kind {
        NeighborhoodKind::Moore => moore.collect(),
        NeighborhoodKind::VonNeumann => moore
            .filter(|w| w.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>() <= 1)
            .collect(),
    };
    Offsets { offsets }
}

fn offsets(kind: NeighborhoodKind, dimension: usize) -> &'static Offsets {
    static CACHE: OnceLock<Vec<Offsets>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        NeighborhoodKind::ALL
            .iter()
            .flat_map(|&k| (1..=3).map(move |d| build_offsets(k, d)))
            .collect()
    });
    let k = match kind {
        NeighborhoodKind::VonNeumann => 0,
        NeighborhoodKind::Moore => 1,
    };
    &all[k * 3 + dimension - 1]
}

/// Offset in `{-1,0,1}^d` of cursor `index` (unused axes are zero).
pub fn cursor_offset(kind: NeighborhoodKind, dimension: usize, index: usize) -> Result<[i8; 3]> {
    check_dimension(dimension)?;
    let table = offsets(kind, dimension);
    table
        .offsets
        .get(index)
        .copied()
        .ok_or(Error::IndexOutOfRange {
            what: "cursor",
            index,
            count: table.offsets.len(),
        })
}

#[inline]
pub(crate) fn cursor_offset_unchecked(kind: NeighborhoodKind, dimension: usize, index: usize) -> [i8; 3] {
    offsets(kind, dimension).offsets[index]
}

/// Inverse of [`cursor_offset`]; `None` when the offset is not part of the
/// neighborhood.
pub fn cursor_index(kind: NeighborhoodKind, dimension: usize, offset: &[i8]) -> Option<usize> {
    if offset.len() < dimension || offset.iter().any(|w| !(-1..=1).contains(w)) {
        return None;
    }
    let digits: Vec<usize> = offset[..dimension].iter().map(|&w| (w + 1) as usize).collect();
    let moore = rank(3, &digits);
    match kind {
        NeighborhoodKind::Moore => Some(moore),
        NeighborhoodKind::VonNeumann => {
            let mut w = [0i8; 3];
            w[..dimension].copy_from_slice(&offset[..dimension]);
            offsets(kind, dimension).offsets.iter().position(|o| *o == w)
        }
    }
}

/// Moore cursor indices of the `2^d` cells sharing corner `corner` of the
/// center cell, ascending. Corners are ranked like binary child coordinates.
pub fn corner_neighbor_cursors(dimension: usize, corner: usize) -> Result<Vec<usize>> {
    check_dimension(dimension)?;
    let count = corner_count(dimension);
    if corner >= count {
        return Err(Error::IndexOutOfRange {
            what: "corner",
            index: corner,
            count,
        });
    }
    Ok(corner_table(dimension)[corner][..count].to_vec())
}

pub(crate) fn corner_table(dimension: usize) -> &'static [[usize; MAX_CORNERS]] {
    static CACHE: OnceLock<Vec<Vec<[usize; MAX_CORNERS]>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        (1..=3)
            .map(|d| {
                (0..corner_count(d))
                    .map(|corner| {
                        let b = unrank(d, 2, corner);
                        let mut row = [0usize; MAX_CORNERS];
                        for (j, slot) in row.iter_mut().enumerate().take(corner_count(d)) {
                            // offset along axis a is b_a - 1 + bit_a(j)
                            let s = unrank(d, 2, j);
                            let digits: Vec<usize> = (0..d).map(|a| b[a] + s[a]).collect();
                            *slot = rank(3, &digits);
                        }
                        row
                    })
                    .collect()
            })
            .collect()
    });
    &all[dimension - 1]
}

/// Child-cursor to parent-cursor and child-cursor to child-index maps for
/// one `(kind, d, f)` configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraversalTables {
    kind: NeighborhoodKind,
    dimension: usize,
    factor: usize,
    cursor_count: usize,
    to_parent: Vec<u8>,
    to_child: Vec<u8>,
}

impl TraversalTables {
    pub fn kind(&self) -> NeighborhoodKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn cursor_count(&self) -> usize {
        self.cursor_count
    }

    pub fn child_count(&self) -> usize {
        child_count(self.dimension, self.factor)
    }

    /// Parent cursor feeding cursor `cursor` of the supercursor centered on
    /// child `child`.
    #[inline]
    pub fn parent_cursor(&self, child: usize, cursor: usize) -> usize {
        self.to_parent[child * self.cursor_count + cursor] as usize
    }

    /// Child index to descend into when that parent cursor is coarse.
    #[inline]
    pub fn child_index(&self, child: usize, cursor: usize) -> usize {
        self.to_child[child * self.cursor_count + cursor] as usize
    }

    pub fn parent_row(&self, child: usize) -> &[u8] {
        &self.to_parent[child * self.cursor_count..(child + 1) * self.cursor_count]
    }

    pub fn child_row(&self, child: usize) -> &[u8] {
        &self.to_child[child * self.cursor_count..(child + 1) * self.cursor_count]
    }

    /// Whole child-cursor to parent-cursor table, rows concatenated in child
    /// index order.
    pub fn to_parent(&self) -> &[u8] {
        &self.to_parent
    }

    /// Whole child-cursor to child-index table, rows concatenated in child
    /// index order.
    pub fn to_child(&self) -> &[u8] {
        &self.to_child
    }

    /// Entries of one of the two tables.
    pub fn entry_count(&self) -> usize {
        self.to_parent.len()
    }
}

/// Builds both traversal tables from the child-level lattice: the cell
/// neighboring child `c` through offset `w` sits at `q = c + w`; it belongs
/// to parent cursor `floor(q / f)` and has child index `q mod f` there.
pub fn generate_traversal_tables(
    kind: NeighborhoodKind,
    dimension: usize,
    factor: usize,
) -> Result<TraversalTables> {
    check_dimension(dimension)?;
    check_factor(factor)?;
    let cursor_count = kind.cursor_count(dimension);
    let children = child_count(dimension, factor);
    let mut to_parent = Vec::with_capacity(children * cursor_count);
    let mut to_child = Vec::with_capacity(children * cursor_count);
    let f = factor as i64;
    for child in 0..children {
        let c = unrank(dimension, factor, child);
        for cursor in 0..cursor_count {
            let w = cursor_offset_unchecked(kind, dimension, cursor);
            let mut parent = [0i8; 3];
            let mut residue = [0usize; 3];
            for a in 0..dimension {
                let q = c[a] as i64 + w[a] as i64;
                parent[a] = q.div_euclid(f) as i8;
                residue[a] = q.rem_euclid(f) as usize;
            }
            let p = cursor_index(kind, dimension, &parent[..dimension])
                .expect("one child step never leaves the parent neighborhood");
            to_parent.push(p as u8);
            to_child.push(rank(factor, &residue[..dimension]) as u8);
        }
    }
    Ok(TraversalTables {
        kind,
        dimension,
        factor,
        cursor_count,
        to_parent,
        to_child,
    })
}

/// Cached tables for a valid configuration.
pub fn traversal_tables(kind: NeighborhoodKind, dimension: usize, factor: usize) -> &'static TraversalTables {
    static CACHE: OnceLock<Vec<TraversalTables>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        let mut v = Vec::with_capacity(12);
        for k in NeighborhoodKind::ALL {
            for d in 1..=3 {
                for f in 2..=3 {
                    v.push(generate_traversal_tables(k, d, f).expect("valid configuration"));
                }
            }
        }
        v
    });
    let k = match kind {
        NeighborhoodKind::VonNeumann => 0,
        NeighborhoodKind::Moore => 1,
    };
    &all[k * 6 + (dimension - 1) * 2 + (factor - 2)]
}

/// Number of traversal tables and total entries over every supported
/// configuration (both neighborhoods, both table kinds, `d` in 1..=3, `f` in
/// 2..=3).
pub fn table_census() -> (usize, usize) {
    let mut tables = 0;
    let mut entries = 0;
    for kind in NeighborhoodKind::ALL {
        for d in 1..=3 {
            for f in 2..=3 {
                let t = traversal_tables(kind, d, f);
                tables += 2;
                entries += t.to_parent().len() + t.to_child().len();
            }
        }
    }
    (tables, entries)
}
