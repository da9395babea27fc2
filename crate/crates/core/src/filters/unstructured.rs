use crate::cursor::{walk_geometric, Cursor};
use crate::grid::HyperTreeGrid;
use crate::indexing::corner_count;
use crate::{check_size_guard, Result};

/// Explicit cell list: every visible leaf becomes a line, quad or hexahedron
/// with its own copy of its corner points.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UnstructuredGrid {
    pub dimension: usize,
    pub points: Vec<[f64; 3]>,
    /// `2^d` point indices per cell, in the usual line / quad / hexahedron
    /// winding.
    pub connectivity: Vec<u32>,
    /// Source leaf global index of every cell.
    pub cell_sources: Vec<u64>,
    /// Per-cell copies of the input fields.
    pub fields: Vec<(String, Vec<f64>)>,
}

impl UnstructuredGrid {
    pub fn cell_count(&self) -> usize {
        self.cell_sources.len()
    }

    pub fn cell(&self, i: usize) -> &[u32] {
        let n = corner_count(self.dimension);
        &self.connectivity[i * n..(i + 1) * n]
    }

    /// Bytes under the explicit storage model: 3 reals per point, one 8-byte
    /// index per connectivity entry, one 8-byte offset and one type byte per
    /// cell, 8 bytes per field value.
    pub fn footprint_bytes(&self) -> u64 {
        let cells = self.cell_count() as u64;
        24 * self.points.len() as u64
            + 8 * self.connectivity.len() as u64
            + 9 * cells
            + 8 * cells * self.fields.len() as u64
    }

    /// [`UnstructuredGrid::footprint_bytes`] of the conversion of `grid`,
    /// computed without building it.
    pub fn predicted_footprint_bytes(grid: &HyperTreeGrid) -> u64 {
        let cells = visible_leaf_count(grid);
        let corners = corner_count(grid.dimension()) as u64;
        cells * (24 * corners + 8 * corners + 9 + 8 * grid.field_count() as u64)
    }
}

fn visible_leaf_count(grid: &HyperTreeGrid) -> u64 {
    if !grid.has_mask() {
        return grid.leaf_total();
    }
    let mut n = 0;
    walk_geometric(grid, |c| {
        n += c.is_leaf() as u64;
        true
    });
    n
}

/// Explicit conversion of the visible leaves; guarded by `HTG_MAX_CELLS`.
pub fn to_unstructured(grid: &HyperTreeGrid) -> Result<UnstructuredGrid> {
    crate::cursor::check_traversable(grid)?;
    check_size_guard("unstructured conversion", grid.leaf_total(), None)?;
    let d = grid.dimension();
    let winding: &[usize] = match d {
        1 => &[0, 1],
        2 => &[0, 1, 3, 2],
        _ => &[0, 1, 3, 2, 4, 5, 7, 6],
    };
    let mut out = UnstructuredGrid {
        dimension: d,
        ..Default::default()
    };
    walk_geometric(grid, |c| {
        if c.is_leaf() {
            for &k in winding {
                out.connectivity.push(out.points.len() as u32);
                out.points.push(grid.cell_corner(c.state(), k));
            }
            out.cell_sources.push(c.global_index().expect("valid cursor"));
        }
        true
    });
    for name in grid.field_names() {
        let values = grid.field(name)?;
        let per_cell = out.cell_sources.iter().map(|&g| values[g as usize]).collect();
        out.fields.push((name.to_string(), per_cell));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_hexahedron() {
        let mut g = HyperTreeGrid::unit(3, 2, [1, 1, 1]).unwrap();
        g.finalize();
        let u = to_unstructured(&g).unwrap();
        assert_eq!((u.points.len(), u.cell_count()), (8, 1));
        assert_eq!(u.points[2], [1.0, 1.0, 0.0]);
    }

    #[test]
    fn octree_depth_one() {
        let mut g = HyperTreeGrid::unit(3, 2, [1, 1, 1]).unwrap();
        g.subdivide([0, 0, 0], 0).unwrap();
        g.finalize();
        g.add_field("a", vec![0.0; 9]).unwrap();
        let u = to_unstructured(&g).unwrap();
        assert_eq!((u.points.len(), u.cell_count()), (64, 8));
        assert_eq!(u.footprint_bytes(), UnstructuredGrid::predicted_footprint_bytes(&g));
    }

    #[test]
    fn quad() {
        let mut g = HyperTreeGrid::unit(2, 3, [1, 1, 1]).unwrap();
        g.finalize();
        let u = to_unstructured(&g).unwrap();
        assert_eq!((u.points.len(), u.cell_count()), (4, 1));
    }
}
