//! Supercursors: a grid cursor tracking a whole neighborhood of cursors.
//!
//! Neighbor entries never point deeper than the center. When the actual
//! neighbor region is refined further, the entry stays on the same-depth
//! coarse cell; when it is coarser, the entry points at the larger leaf,
//! which may then appear in several slots.

use std::marker::PhantomData;

use crate::cursor::{check_traversable, CellState};
use crate::grid::{GeometricEmbedding, HyperTreeGrid};
use crate::indexing::{
    corner_count, corner_table, cursor_offset_unchecked, traversal_tables, NeighborhoodKind,
    TraversalTables, MAX_CURSORS,
};
use crate::{Error, Result};

pub trait Neighborhood: Copy + Send + Sync + 'static {
    const KIND: NeighborhoodKind;
}

/// Face neighbors.
#[derive(Clone, Copy, Debug)]
pub struct VonNeumann;

/// Face, edge and corner neighbors.
#[derive(Clone, Copy, Debug)]
pub struct Moore;

impl Neighborhood for VonNeumann {
    const KIND: NeighborhoodKind = NeighborhoodKind::VonNeumann;
}

impl Neighborhood for Moore {
    const KIND: NeighborhoodKind = NeighborhoodKind::Moore;
}

#[derive(Clone, Debug)]
pub struct Supercursor<'g, N: Neighborhood> {
    grid: &'g HyperTreeGrid,
    tables: &'static TraversalTables,
    cells: [CellState; MAX_CURSORS],
    count: usize,
    center: usize,
    tree_coords: [usize; 3],
    _neighborhood: PhantomData<N>,
}

pub type VonNeumannSupercursor<'g> = Supercursor<'g, VonNeumann>;
pub type MooreSupercursor<'g> = Supercursor<'g, Moore>;

impl<'g, N: Neighborhood> Supercursor<'g, N> {
    /// Supercursor at the root of the tree at `coords`, with neighbor entries
    /// on the roots of the adjacent trees (invalid outside the grid).
    pub fn to_root(grid: &'g HyperTreeGrid, coords: [usize; 3]) -> Result<Self> {
        check_traversable(grid)?;
        grid.slot_of(coords)?;
        Ok(Self::at_coords(grid, coords))
    }

    pub(crate) fn at_coords(grid: &'g HyperTreeGrid, coords: [usize; 3]) -> Self {
        let d = grid.dimension();
        let count = N::KIND.cursor_count(d);
        let mut cells = [CellState::INVALID; MAX_CURSORS];
        for (k, cell) in cells.iter_mut().enumerate().take(count) {
            *cell = grid.root_cell_offset(coords, cursor_offset_unchecked(N::KIND, d, k));
        }
        Self {
            grid,
            tables: traversal_tables(N::KIND, d, grid.factor()),
            cells,
            count,
            center: N::KIND.center(d),
            tree_coords: coords,
            _neighborhood: PhantomData,
        }
    }

    pub fn grid(&self) -> &'g HyperTreeGrid {
        self.grid
    }

    pub fn tree_coords(&self) -> [usize; 3] {
        self.tree_coords
    }

    pub fn cursor_count(&self) -> usize {
        self.count
    }

    pub fn center_index(&self) -> usize {
        self.center
    }

    #[inline]
    pub fn center(&self) -> &CellState {
        &self.cells[self.center]
    }

    #[inline]
    pub fn neighbor(&self, k: usize) -> &CellState {
        &self.cells[k]
    }

    pub fn neighbors(&self) -> &[CellState] {
        &self.cells[..self.count]
    }

    pub fn is_leaf(&self) -> bool {
        self.grid.cell_is_leaf(self.center())
    }

    pub fn is_masked(&self) -> bool {
        self.center().is_masked()
    }

    pub fn depth(&self) -> u32 {
        self.center().depth()
    }

    pub fn global_index(&self) -> Option<u64> {
        self.grid.cell_global(self.center())
    }

    pub fn neighbor_is_leaf(&self, k: usize) -> bool {
        self.grid.cell_is_leaf(&self.cells[k])
    }

    pub fn neighbor_global_index(&self, k: usize) -> Option<u64> {
        self.grid.cell_global(&self.cells[k])
    }

    /// Embedding of entry `k`; `None` when the entry is invalid.
    pub fn embedding(&self, k: usize) -> Option<GeometricEmbedding> {
        let c = &self.cells[k];
        c.is_valid().then(|| self.grid.cell_embedding(c))
    }

    /// Center point of entry `k`; `None` when the entry is invalid.
    pub fn neighbor_center(&self, k: usize) -> Option<[f64; 3]> {
        let c = &self.cells[k];
        c.is_valid().then(|| self.grid.cell_center(c))
    }

    /// Moves the whole neighborhood into child `index` of the center. Every
    /// entry is copied from the parent entry named by the traversal table and,
    /// when that entry is not a leaf, descended once into the tabulated child.
    pub fn to_child(&mut self, index: usize) -> Result<()> {
        let children = self.tables.child_count();
        if index >= children {
            return Err(Error::IndexOutOfRange {
                what: "child",
                index,
                count: children,
            });
        }
        if self.is_leaf() {
            return Err(Error::LeafCursor);
        }
        let snapshot = self.cells;
        let parents = self.tables.parent_row(index);
        let child_indices = self.tables.child_row(index);
        for j in 0..self.count {
            let parent = &snapshot[parents[j] as usize];
            self.cells[j] = if self.grid.cell_is_leaf(parent) {
                *parent
            } else {
                self.grid
                    .cell_child(parent, child_indices[j] as usize)
                    .expect("non-leaf entry is refined")
            };
        }
        Ok(())
    }

    /// Copy moved into child `index`.
    pub fn child(&self, index: usize) -> Result<Self> {
        let mut s = self.clone();
        s.to_child(index)?;
        Ok(s)
    }
}

impl<'g> MooreSupercursor<'g> {
    /// Entry `j` of the `2^d` cells around corner `corner` of the center.
    #[inline]
    pub fn corner_neighbor(&self, corner: usize, j: usize) -> usize {
        corner_table(self.grid.dimension())[corner][j]
    }

    pub fn corner_count(&self) -> usize {
        corner_count(self.grid.dimension())
    }
}

/// Pre-order depth-first walk over every tree. `visit` is called on each
/// reachable cell (masked ones included); the walk descends below a cell only
/// when it is not a leaf and `visit` returned `true`.
pub fn depth_first<'g, N, F>(grid: &'g HyperTreeGrid, mut visit: F) -> Result<()>
where
    N: Neighborhood,
    F: FnMut(&Supercursor<'g, N>) -> bool,
{
    check_traversable(grid)?;
    for (slot, _) in grid.trees() {
        depth_first_tree(grid, slot, &mut visit);
    }
    Ok(())
}

pub(crate) fn depth_first_tree<'g, N, F>(grid: &'g HyperTreeGrid, slot: usize, visit: &mut F)
where
    N: Neighborhood,
    F: FnMut(&Supercursor<'g, N>) -> bool,
{
    fn rec<'g, N: Neighborhood, F: FnMut(&Supercursor<'g, N>) -> bool>(
        s: &Supercursor<'g, N>,
        visit: &mut F,
    ) {
        if !visit(s) || s.is_leaf() {
            return;
        }
        for i in 0..s.tables.child_count() {
            rec(&s.child(i).expect("non-leaf center"), visit);
        }
    }
    let s = Supercursor::<N>::at_coords(grid, grid.coords_of(slot));
    rec(&s, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cursor::{Cursor, GridCursor};

    #[test]
    fn to_root_single_tree() {
        let mut g = HyperTreeGrid::unit(2, 2, [1, 1, 1]).unwrap();
        g.finalize();
        let s = MooreSupercursor::to_root(&g, [0, 0, 0]).unwrap();
        let invalid = (0..9).filter(|&k| !s.neighbor(k).is_valid()).count();
        assert_eq!(invalid, 8);
        assert!(s.center().is_valid());
    }

    #[test]
    fn to_root_line_neighbors() {
        let mut g = HyperTreeGrid::unit(1, 2, [2, 1, 1]).unwrap();
        g.finalize();
        let s = MooreSupercursor::to_root(&g, [0, 0, 0]).unwrap();
        assert!(!s.neighbor(0).is_valid());
        assert_eq!(s.neighbor(2).slot(), Some(1));
        assert_eq!(s.neighbor(2).vertex(), 0);
    }

    #[test]
    fn to_root_interior_tree() {
        let mut g = HyperTreeGrid::unit(2, 2, [3, 3, 1]).unwrap();
        g.finalize();
        let s = MooreSupercursor::to_root(&g, [1, 1, 0]).unwrap();
        assert!(s.neighbors().iter().all(|c| c.is_valid()));
        assert!(MooreSupercursor::to_root(&g, [3, 0, 0]).is_err());
    }

    fn line_f3(refine_left: bool) -> HyperTreeGrid {
        let mut g = HyperTreeGrid::unit(1, 3, [3, 1, 1]).unwrap();
        g.subdivide([1, 0, 0], 0).unwrap();
        if refine_left {
            g.subdivide([0, 0, 0], 0).unwrap();
        }
        g.finalize();
        g
    }

    #[test]
    fn descent_with_leaf_neighbors() {
        let g = line_f3(false);
        let s = MooreSupercursor::to_root(&g, [1, 0, 0]).unwrap().child(0).unwrap();
        // left entry stays on the neighbor root, center is child 0, right is sibling 1
        assert_eq!((s.neighbor(0).slot(), s.neighbor(0).vertex()), (Some(0), 0));
        assert_eq!((s.neighbor(1).slot(), s.neighbor(1).vertex()), (Some(1), 1));
        assert_eq!((s.neighbor(2).slot(), s.neighbor(2).vertex()), (Some(1), 2));
    }

    #[test]
    fn descent_into_refined_neighbor() {
        let g = line_f3(true);
        let s = MooreSupercursor::to_root(&g, [1, 0, 0]).unwrap().child(0).unwrap();
        // child index 2 of the left neighbor root is its vertex 3
        assert_eq!((s.neighbor(0).slot(), s.neighbor(0).vertex()), (Some(0), 3));
        assert_eq!(s.neighbor(0).depth(), 1);
    }

    #[test]
    fn center_follows_child() {
        let g = line_f3(true);
        for i in 0..3 {
            let s = VonNeumannSupercursor::to_root(&g, [1, 0, 0]).unwrap().child(i).unwrap();
            let c = GridCursor::to_root(&g, [1, 0, 0]).unwrap().child(i).unwrap();
            assert_eq!(s.center(), c.state());
        }
    }

    #[test]
    fn leaf_center_cannot_descend() {
        let g = line_f3(false);
        let mut s = MooreSupercursor::to_root(&g, [0, 0, 0]).unwrap();
        assert!(matches!(s.to_child(0), Err(Error::LeafCursor)));
    }
}
