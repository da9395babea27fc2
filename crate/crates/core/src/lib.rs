//! Hypertree grids: rectilinear grids of refinement trees, with cursor and
//! supercursor traversal, a virtual dual mesh and a set of filters.

pub mod cursor;
pub mod dual;
pub mod error;
pub mod filters;
pub mod grid;
pub mod indexing;
pub mod io;
pub mod polydata;
pub mod supercursor;
pub mod tree;

pub use cursor::{CellState, Cursor, GeometricCursor, GridCursor, TreeCursor};
pub use dual::{adjust_dual_point, build_full_dual, generate_dual_cell, is_owner, DualCell, DualMesh};
pub use error::{Error, Result};
pub use grid::{GeometricEmbedding, HyperTreeGrid, MemoryReport};
pub use indexing::{
    child_coords, child_count, child_index, corner_count, corner_neighbor_cursors, cursor_index,
    cursor_offset, generate_traversal_tables, table_census, traversal_tables, ChildCoords,
    NeighborhoodKind, TraversalTables,
};
pub use polydata::PolygonalOutput;
pub use supercursor::{
    depth_first, Moore, MooreSupercursor, Neighborhood, Supercursor, VonNeumann,
    VonNeumannSupercursor,
};
pub use tree::{HyperTree, MAX_DEPTH, NO_CHILD};

/// Default cap on the number of cells an explicit output may hold.
pub const DEFAULT_MAX_CELLS: u64 = 1 << 26;

/// Cell cap for explicit outputs: `HTG_MAX_CELLS` when set and valid,
/// [`DEFAULT_MAX_CELLS`] otherwise.
pub fn max_cells() -> u64 {
    std::env::var("HTG_MAX_CELLS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_CELLS)
}

/// Fails with [`Error::SizeGuard`] when `cells` exceeds `limit` (or
/// [`max_cells`] when no limit is given).
pub fn check_size_guard(what: &'static str, cells: u64, limit: Option<u64>) -> Result<()> {
    let limit = limit.unwrap_or_else(max_cells);
    if cells > limit {
        return Err(Error::SizeGuard { what, cells, limit });
    }
    Ok(())
}
