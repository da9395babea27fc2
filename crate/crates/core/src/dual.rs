//! Virtual dual mesh.
//!
//! Dual vertices are primal leaf centers and dual cells correspond to primal
//! corners. Each corner is owned by exactly one of the leaves touching it: the
//! deepest one, ties going to the greatest Moore cursor index. A leaf can thus
//! generate the dual cells it owns on demand, one at a time, from its Moore
//! supercursor.

use std::collections::HashMap;

use smallvec::SmallVec;

use crate::grid::{GeometricEmbedding, HyperTreeGrid};
use crate::indexing::corner_count;
use crate::supercursor::{depth_first, MooreSupercursor};
use crate::{check_size_guard, Error, Result};

/// One dual cell: `2^d` points in binary corner order, with the matching
/// field values and source leaves. Points may repeat when a coarser leaf
/// touches the corner through several slots.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCell {
    pub points: SmallVec<[[f64; 3]; 8]>,
    pub values: SmallVec<[f64; 8]>,
    pub sources: SmallVec<[u64; 8]>,
}

/// Whether the leaf at the center of `s` owns the dual cell of its corner
/// `corner`.
pub fn is_owner(s: &MooreSupercursor<'_>, corner: usize) -> bool {
    if corner >= s.corner_count() || s.is_masked() || !s.is_leaf() {
        return false;
    }
    let depth = s.depth();
    let center = s.center_index();
    (0..s.corner_count()).all(|j| {
        let k = s.corner_neighbor(corner, j);
        let c = s.neighbor(k);
        !(c.is_masked() || !s.neighbor_is_leaf(k) || (k > center && c.depth() == depth))
    })
}

/// Dual cell of an owned corner. `field` supplies the values (indexed by
/// global index); without it `values` is left empty.
pub fn generate_dual_cell(
    s: &MooreSupercursor<'_>,
    corner: usize,
    field: Option<&[f64]>,
) -> Result<DualCell> {
    if !is_owner(s, corner) {
        return Err(Error::NotOwner(corner));
    }
    Ok(dual_cell_unchecked(s, corner, field))
}

pub(crate) fn dual_cell_unchecked(
    s: &MooreSupercursor<'_>,
    corner: usize,
    field: Option<&[f64]>,
) -> DualCell {
    let n = s.corner_count();
    let mut cell = DualCell {
        points: SmallVec::with_capacity(n),
        values: SmallVec::new(),
        sources: SmallVec::with_capacity(n),
    };
    for j in 0..n {
        let k = s.corner_neighbor(corner, j);
        let g = s.neighbor_global_index(k).expect("owned corner has valid neighbors");
        cell.points.push(s.neighbor_center(k).expect("valid neighbor"));
        cell.sources.push(g);
        if let Some(f) = field {
            cell.values.push(f[g as usize]);
        }
    }
    cell
}

/// Moves a dual point onto the outer boundary of the grid along every axis
/// where its source leaf touches that boundary.
pub fn adjust_dual_point(grid: &HyperTreeGrid, point: [f64; 3], leaf: &GeometricEmbedding) -> [f64; 3] {
    let (gmin, gmax) = grid.bounding_box();
    let (lmin, lmax) = leaf.bounds();
    let mut p = point;
    for a in 0..grid.dimension() {
        if lmin[a] == gmin[a] {
            p[a] = gmin[a];
        } else if lmax[a] == gmax[a] {
            p[a] = gmax[a];
        }
    }
    p
}

/// Explicit dual mesh. Cells have `2^d` point indices each, in binary corner
/// order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DualMesh {
    pub dimension: usize,
    pub points: Vec<[f64; 3]>,
    /// Global index of the leaf behind each point.
    pub point_sources: Vec<u64>,
    pub cells: Vec<u32>,
}

impl DualMesh {
    pub fn corners_per_cell(&self) -> usize {
        corner_count(self.dimension)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len() / self.corners_per_cell()
    }

    pub fn cell(&self, i: usize) -> &[u32] {
        let n = self.corners_per_cell();
        &self.cells[i * n..(i + 1) * n]
    }
}

/// Materializes the whole dual. Meant for small grids only; the leaf count is
/// checked against `max_cells` (or `HTG_MAX_CELLS`).
pub fn build_full_dual(grid: &HyperTreeGrid, adjusted: bool, max_cells: Option<u64>) -> Result<DualMesh> {
    check_size_guard("dual", grid.leaf_total(), max_cells)?;
    let mut mesh = DualMesh {
        dimension: grid.dimension(),
        ..Default::default()
    };
    let mut ids: HashMap<u64, u32> = HashMap::new();
    depth_first(grid, |s: &MooreSupercursor<'_>| {
        if s.is_masked() || !s.is_leaf() {
            return !s.is_masked();
        }
        for corner in 0..s.corner_count() {
            if !is_owner(s, corner) {
                continue;
            }
            for j in 0..s.corner_count() {
                let k = s.corner_neighbor(corner, j);
                let g = s.neighbor_global_index(k).expect("valid neighbor");
                let id = *ids.entry(g).or_insert_with(|| {
                    let mut p = s.neighbor_center(k).expect("valid neighbor");
                    if adjusted {
                        p = adjust_dual_point(grid, p, &s.embedding(k).expect("valid neighbor"));
                    }
                    mesh.points.push(p);
                    mesh.point_sources.push(g);
                    (mesh.points.len() - 1) as u32
                });
                mesh.cells.push(id);
            }
        }
        true
    })?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finalize(mut g: HyperTreeGrid) -> HyperTreeGrid {
        g.finalize();
        g
    }

    #[test]
    fn lone_leaf_owns_nothing() {
        let g = finalize(HyperTreeGrid::unit(2, 2, [1, 1, 1]).unwrap());
        let s = MooreSupercursor::to_root(&g, [0, 0, 0]).unwrap();
        assert!((0..4).all(|c| !is_owner(&s, c)));
    }

    #[test]
    fn shared_corner_of_two_segments() {
        let g = finalize(HyperTreeGrid::unit(1, 2, [2, 1, 1]).unwrap());
        let left = MooreSupercursor::to_root(&g, [0, 0, 0]).unwrap();
        let right = MooreSupercursor::to_root(&g, [1, 0, 0]).unwrap();
        // the right cell sees the left one at cursor 0 < center, so it owns
        // the shared corner; the left cell sees it at cursor 2 > center
        let owners = [is_owner(&left, 1), is_owner(&right, 0)];
        assert_eq!(owners.iter().filter(|&&o| o).count(), 1);
        assert!(owners[1]);
        let cell = generate_dual_cell(&right, 0, None).unwrap();
        assert_eq!(cell.points[0][0], 0.5);
        assert_eq!(cell.points[1][0], 1.5);
        assert!(generate_dual_cell(&left, 1, None).is_err());
    }

    #[test]
    fn uniform_quad_dual_cell() {
        let g = finalize(HyperTreeGrid::unit(2, 2, [2, 2, 1]).unwrap());
        let mut owners = 0;
        for c in [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]] {
            let s = MooreSupercursor::to_root(&g, c).unwrap();
            for corner in 0..4 {
                if is_owner(&s, corner) {
                    owners += 1;
                    let cell = generate_dual_cell(&s, corner, None).unwrap();
                    let pts: Vec<_> = cell.points.iter().map(|p| (p[0], p[1])).collect();
                    assert_eq!(pts, vec![(0.5, 0.5), (1.5, 0.5), (0.5, 1.5), (1.5, 1.5)]);
                }
            }
        }
        assert_eq!(owners, 1);
    }

    #[test]
    fn adjust_examples() {
        let mut g = HyperTreeGrid::unit(2, 2, [1, 1, 1]).unwrap();
        g.subdivide([0, 0, 0], 0).unwrap();
        g.finalize();
        let leaf = GeometricEmbedding {
            origin: [0.0, 0.0, 0.0],
            size: [0.5, 0.5, 0.0],
            orientation: 2,
        };
        assert_eq!(adjust_dual_point(&g, [0.25, 0.25, 0.0], &leaf), [0.0, 0.0, 0.0]);

        let mut g = HyperTreeGrid::unit(2, 2, [4, 4, 1]).unwrap();
        g.finalize();
        let interior = g.tree_embedding([1, 1, 0]).unwrap();
        assert_eq!(adjust_dual_point(&g, [1.5, 1.5, 0.0], &interior), [1.5, 1.5, 0.0]);
        let left = g.tree_embedding([0, 1, 0]).unwrap();
        assert_eq!(adjust_dual_point(&g, [0.5, 1.5, 0.0], &left), [0.0, 1.5, 0.0]);
    }

    #[test]
    fn full_dual_counts() {
        let g = finalize(HyperTreeGrid::unit(1, 2, [2, 1, 1]).unwrap());
        assert_eq!(build_full_dual(&g, false, None).unwrap().cell_count(), 1);
        let g = finalize(HyperTreeGrid::unit(1, 3, [7, 1, 1]).unwrap());
        assert_eq!(build_full_dual(&g, false, None).unwrap().cell_count(), 6);
        let mut g = HyperTreeGrid::unit(2, 2, [1, 1, 1]).unwrap();
        g.subdivide([0, 0, 0], 0).unwrap();
        g.finalize();
        let dual = build_full_dual(&g, false, None).unwrap();
        assert_eq!(dual.cell_count(), 1);
        assert_eq!(dual.points.len(), 4);
    }

    #[test]
    fn full_dual_guard() {
        let g = finalize(HyperTreeGrid::unit(1, 2, [10, 1, 1]).unwrap());
        assert!(matches!(build_full_dual(&g, false, Some(5)), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn coarse_neighbor_yields_degenerate_cell() {
        // T-junction: right tree refined, left tree a single leaf
        let mut g = HyperTreeGrid::unit(2, 2, [2, 1, 1]).unwrap();
        g.subdivide([1, 0, 0], 0).unwrap();
        g.finalize();
        let dual = build_full_dual(&g, false, None).unwrap();
        // one cell around the hanging node, one around the interior corner of
        // the refined tree
        assert_eq!(dual.cell_count(), 2);
        let degenerate = (0..dual.cell_count())
            .filter(|&i| {
                let c = dual.cell(i);
                c[0] == c[2]
            })
            .count();
        assert_eq!(degenerate, 1);
    }
}
