//! Tree, grid and geometric cursors.
//!
//! All cursors descend only: a depth-first traversal restarts from
//! [`GridCursor::to_root`] for each tree and clones a cursor before entering
//! a child. A cursor may also be *invalid* (outside the grid, or on an absent
//! tree); invalid cursors report themselves as masked leaves.

use smallvec::SmallVec;

use crate::grid::{GeometricEmbedding, HyperTreeGrid};
use crate::indexing::unrank;
use crate::tree::{HyperTree, MAX_DEPTH};
use crate::{Error, Result};

const INVALID: u32 = u32::MAX;

/// Position of a cursor inside a grid: tree slot, vertex, depth and integer
/// lattice position of the cell at its depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellState {
    slot: u32,
    vertex: u32,
    depth: u32,
    lattice: [u32; 3],
    masked: bool,
}

impl CellState {
    pub const INVALID: CellState = CellState {
        slot: INVALID,
        vertex: 0,
        depth: 0,
        lattice: [0; 3],
        masked: true,
    };

    #[inline]
    pub fn is_valid(&self) -> bool {
        self.slot != INVALID
    }

    pub fn slot(&self) -> Option<usize> {
        self.is_valid().then_some(self.slot as usize)
    }

    #[inline]
    pub fn vertex(&self) -> u32 {
        self.vertex
    }

    #[inline]
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Masked directly, through an ancestor, or invalid.
    #[inline]
    pub fn is_masked(&self) -> bool {
        self.masked
    }

    pub fn lattice(&self) -> [u32; 3] {
        self.lattice
    }
}

impl HyperTreeGrid {
    /// Root cell of the tree in `slot`, or an invalid state when absent.
    pub fn root_cell(&self, slot: usize) -> CellState {
        if self.tree_at(slot).is_none() {
            return CellState::INVALID;
        }
        CellState {
            slot: slot as u32,
            vertex: 0,
            depth: 0,
            lattice: [0; 3],
            masked: self.is_masked_index(self.start_of(slot)),
        }
    }

    /// Root cell at tree position `coords + offset`; invalid outside the grid.
    pub(crate) fn root_cell_offset(&self, coords: [usize; 3], offset: [i8; 3]) -> CellState {
        let mut c = [0usize; 3];
        for a in 0..3 {
            let x = coords[a] as i64 + offset[a] as i64;
            if x < 0 || x >= self.extent()[a] as i64 {
                return CellState::INVALID;
            }
            c[a] = x as usize;
        }
        let slot = c[0] + self.extent()[0] * (c[1] + self.extent()[1] * c[2]);
        self.root_cell(slot)
    }

    #[inline]
    fn cell_tree(&self, cell: &CellState) -> Option<&HyperTree> {
        if cell.is_valid() {
            self.tree_at(cell.slot as usize)
        } else {
            None
        }
    }

    /// Global index of a valid cell.
    #[inline]
    pub fn cell_global(&self, cell: &CellState) -> Option<u64> {
        cell.is_valid()
            .then(|| self.start_of(cell.slot as usize) + cell.vertex as u64)
    }

    /// Whether the cell is a leaf for processing purposes: a true leaf, a
    /// strict node whose children are all masked, a masked cell or an invalid
    /// one.
    #[inline]
    pub fn cell_is_leaf(&self, cell: &CellState) -> bool {
        if cell.masked {
            return true;
        }
        let Some(tree) = self.cell_tree(cell) else {
            return true;
        };
        let Some(eldest) = tree.eldest_child(cell.vertex) else {
            return true;
        };
        if self.has_mask() {
            let base = self.start_of(cell.slot as usize) + eldest as u64;
            (0..tree.child_count() as u64).all(|i| self.is_masked_index(base + i))
        } else {
            false
        }
    }

    /// Whether the vertex is structurally refined (ignores the mask).
    #[inline]
    pub fn cell_is_strict(&self, cell: &CellState) -> bool {
        self.cell_tree(cell).is_some_and(|t| !t.is_leaf(cell.vertex))
    }

    /// Child `index` of a structurally refined cell.
    #[inline]
    pub fn cell_child(&self, cell: &CellState, index: usize) -> Option<CellState> {
        let tree = self.cell_tree(cell)?;
        let eldest = tree.eldest_child(cell.vertex)?;
        let vertex = eldest + index as u32;
        let c = unrank(self.dimension(), self.factor(), index);
        let f = self.factor() as u32;
        let mut lattice = cell.lattice;
        for a in 0..self.dimension() {
            lattice[a] = lattice[a] * f + c[a] as u32;
        }
        let global = self.start_of(cell.slot as usize) + vertex as u64;
        Some(CellState {
            slot: cell.slot,
            vertex,
            depth: cell.depth + 1,
            lattice,
            masked: cell.masked || self.is_masked_index(global),
        })
    }

    #[inline]
    fn cell_den(&self, depth: u32) -> u64 {
        (self.factor() as u64).pow(depth)
    }

    /// Point at lattice fraction `num[a] / den` of the tree holding `cell`.
    #[inline]
    pub(crate) fn lattice_point(&self, slot: usize, num: [u64; 3], den: u64) -> [f64; 3] {
        let pos = self.coords_of(slot);
        std::array::from_fn(|a| self.lattice_coordinate(a, pos[a], num[a], den))
    }

    /// Corner `corner` (binary child-coordinate rank) of a valid cell.
    pub fn cell_corner(&self, cell: &CellState, corner: usize) -> [f64; 3] {
        let den = self.cell_den(cell.depth);
        let num = std::array::from_fn(|a| cell.lattice[a] as u64 + ((corner >> a) & 1) as u64);
        self.lattice_point(cell.slot as usize, num, den)
    }

    /// Center of a valid cell.
    pub fn cell_center(&self, cell: &CellState) -> [f64; 3] {
        let den = 2 * self.cell_den(cell.depth);
        let num = std::array::from_fn(|a| 2 * cell.lattice[a] as u64 + 1);
        self.lattice_point(cell.slot as usize, num, den)
    }

    /// Embedding of a valid cell: origin at its lattice-low corner, signed
    /// size.
    pub fn cell_embedding(&self, cell: &CellState) -> GeometricEmbedding {
        let lo = self.cell_corner(cell, 0);
        let hi = self.cell_corner(cell, (1 << self.dimension()) - 1);
        let mut size = [0.0; 3];
        for a in 0..self.dimension() {
            size[a] = hi[a] - lo[a];
        }
        GeometricEmbedding {
            origin: lo,
            size,
            orientation: self.orientation(),
        }
    }

    /// `(min, max)` box of a valid cell.
    pub fn cell_bounds(&self, cell: &CellState) -> ([f64; 3], [f64; 3]) {
        self.cell_embedding(cell).bounds()
    }
}

/// Common cursor interface.
pub trait Cursor {
    fn grid(&self) -> &HyperTreeGrid;
    fn state(&self) -> &CellState;
    /// Descends into child `index` of the current (non-leaf) cell.
    fn to_child(&mut self, index: usize) -> Result<()>;

    fn is_valid(&self) -> bool {
        self.state().is_valid()
    }
    fn is_leaf(&self) -> bool {
        self.grid().cell_is_leaf(self.state())
    }
    fn is_masked(&self) -> bool {
        self.state().is_masked()
    }
    fn depth(&self) -> u32 {
        self.state().depth()
    }
    fn vertex(&self) -> u32 {
        self.state().vertex()
    }
    fn global_index(&self) -> Option<u64> {
        self.grid().cell_global(self.state())
    }
}

type Path = SmallVec<[(u32, u8); MAX_DEPTH as usize]>;

/// Cursor over a single hypertree; carries the root-to-vertex path.
#[derive(Clone, Debug)]
pub struct TreeCursor<'a> {
    tree: &'a HyperTree,
    vertex: u32,
    path: Path,
}

impl<'a> TreeCursor<'a> {
    pub fn to_root(tree: &'a HyperTree) -> Self {
        Self {
            tree,
            vertex: 0,
            path: Path::new(),
        }
    }

    pub fn tree(&self) -> &'a HyperTree {
        self.tree
    }

    pub fn vertex(&self) -> u32 {
        self.vertex
    }

    pub fn depth(&self) -> u32 {
        self.path.len() as u32
    }

    pub fn is_leaf(&self) -> bool {
        self.tree.is_leaf(self.vertex)
    }

    /// `(vertex, child index)` pairs from the root down to the parent of the
    /// current vertex.
    pub fn path(&self) -> &[(u32, u8)] {
        &self.path
    }

    pub fn to_child(&mut self, index: usize) -> Result<()> {
        if index >= self.tree.child_count() {
            return Err(Error::IndexOutOfRange {
                what: "child",
                index,
                count: self.tree.child_count(),
            });
        }
        let child = self.tree.child(self.vertex, index).ok_or(Error::LeafCursor)?;
        self.path.push((self.vertex, index as u8));
        self.vertex = child;
        Ok(())
    }
}

/// Cursor over a hypertree grid: a tree cursor plus the tree position, with
/// mask-aware leaf semantics.
#[derive(Clone, Debug)]
pub struct GridCursor<'a> {
    grid: &'a HyperTreeGrid,
    coords: [usize; 3],
    cell: CellState,
    path: Path,
}

pub(crate) fn check_traversable(grid: &HyperTreeGrid) -> Result<()> {
    if grid.is_finalized() {
        Ok(())
    } else {
        Err(Error::NotFinalized("traversal"))
    }
}

impl<'a> GridCursor<'a> {
    /// Cursor at the root of the tree at `coords`; invalid when the tree is
    /// absent.
    pub fn to_root(grid: &'a HyperTreeGrid, coords: [usize; 3]) -> Result<Self> {
        check_traversable(grid)?;
        let slot = grid.slot_of(coords)?;
        Ok(Self::at_slot(grid, slot))
    }

    pub(crate) fn at_slot(grid: &'a HyperTreeGrid, slot: usize) -> Self {
        Self {
            grid,
            coords: grid.coords_of(slot),
            cell: grid.root_cell(slot),
            path: Path::new(),
        }
    }

    pub fn tree_coords(&self) -> [usize; 3] {
        self.coords
    }

    pub fn path(&self) -> &[(u32, u8)] {
        &self.path
    }

    /// Child cursor, leaving `self` untouched.
    pub fn child(&self, index: usize) -> Result<Self> {
        let mut c = self.clone();
        c.to_child(index)?;
        Ok(c)
    }
}

impl Cursor for GridCursor<'_> {
    fn grid(&self) -> &HyperTreeGrid {
        self.grid
    }

    fn state(&self) -> &CellState {
        &self.cell
    }

    fn to_child(&mut self, index: usize) -> Result<()> {
        let count = self.grid.child_count();
        if index >= count {
            return Err(Error::IndexOutOfRange {
                what: "child",
                index,
                count,
            });
        }
        if self.grid.cell_is_leaf(&self.cell) {
            return Err(Error::LeafCursor);
        }
        let child = self.grid.cell_child(&self.cell, index).ok_or(Error::LeafCursor)?;
        self.path.push((self.cell.vertex, index as u8));
        self.cell = child;
        Ok(())
    }
}

/// Grid cursor that also maintains the embedding of the current cell.
#[derive(Clone, Debug)]
pub struct GeometricCursor<'a> {
    inner: GridCursor<'a>,
    embedding: Option<GeometricEmbedding>,
}

impl<'a> GeometricCursor<'a> {
    pub fn to_root(grid: &'a HyperTreeGrid, coords: [usize; 3]) -> Result<Self> {
        Ok(Self::from_grid_cursor(GridCursor::to_root(grid, coords)?))
    }

    pub(crate) fn at_slot(grid: &'a HyperTreeGrid, slot: usize) -> Self {
        Self::from_grid_cursor(GridCursor::at_slot(grid, slot))
    }

    fn from_grid_cursor(inner: GridCursor<'a>) -> Self {
        let embedding = inner
            .cell
            .is_valid()
            .then(|| inner.grid.cell_embedding(&inner.cell));
        Self { inner, embedding }
    }

    pub fn tree_coords(&self) -> [usize; 3] {
        self.inner.coords
    }

    /// Embedding of the current cell; `None` for invalid cursors.
    pub fn embedding(&self) -> Option<&GeometricEmbedding> {
        self.embedding.as_ref()
    }

    pub fn bounds(&self) -> Option<([f64; 3], [f64; 3])> {
        self.embedding.map(|e| e.bounds())
    }

    pub fn center(&self) -> Option<[f64; 3]> {
        self.inner
            .cell
            .is_valid()
            .then(|| self.inner.grid.cell_center(&self.inner.cell))
    }

    pub fn child(&self, index: usize) -> Result<Self> {
        let mut c = self.clone();
        c.to_child(index)?;
        Ok(c)
    }
}

impl Cursor for GeometricCursor<'_> {
    fn grid(&self) -> &HyperTreeGrid {
        self.inner.grid
    }

    fn state(&self) -> &CellState {
        &self.inner.cell
    }

    fn to_child(&mut self, index: usize) -> Result<()> {
        self.inner.to_child(index)?;
        self.embedding = Some(self.inner.grid.cell_embedding(&self.inner.cell));
        Ok(())
    }
}

/// Pre-order walk over the visible cells of every tree with a geometric
/// cursor. `visit` returns whether to descend below a non-leaf cell.
pub(crate) fn walk_geometric<'a, F>(grid: &'a HyperTreeGrid, mut visit: F)
where
    F: FnMut(&GeometricCursor<'a>) -> bool,
{
    fn rec<'a, F: FnMut(&GeometricCursor<'a>) -> bool>(c: &GeometricCursor<'a>, visit: &mut F) {
        if c.is_masked() || !visit(c) || c.is_leaf() {
            return;
        }
        for i in 0..c.grid().child_count() {
            let child = c.child(i).expect("non-leaf cursor has children");
            rec(&child, visit);
        }
    }
    for (slot, _) in grid.trees() {
        rec(&GeometricCursor::at_slot(grid, slot), &mut visit);
    }
}

/// Same walk with a plain grid cursor; masked cells are not visited.
#[cfg(test)]
pub(crate) fn walk_grid<'a, F>(grid: &'a HyperTreeGrid, mut visit: F)
where
    F: FnMut(&GridCursor<'a>) -> bool,
{
    fn rec<'a, F: FnMut(&GridCursor<'a>) -> bool>(c: &GridCursor<'a>, visit: &mut F) {
        if c.is_masked() || !visit(c) || c.is_leaf() {
            return;
        }
        for i in 0..c.grid().child_count() {
            let child = c.child(i).expect("non-leaf cursor has children");
            rec(&child, visit);
        }
    }
    for (slot, _) in grid.trees() {
        rec(&GridCursor::at_slot(grid, slot), &mut visit);
    }
}
