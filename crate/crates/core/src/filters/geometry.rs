use crate::cursor::{walk_geometric, CellState, Cursor};
use crate::grid::HyperTreeGrid;
use crate::indexing::{cursor_offset_unchecked, NeighborhoodKind};
use crate::polydata::PolygonalOutput;
use crate::supercursor::{depth_first, VonNeumannSupercursor};
use crate::Result;

/// Outer surface of the visible cells.
///
/// Below dimension 3 every visible leaf is emitted whole (a segment or a
/// quad). In dimension 3 a leaf face is emitted when nothing visible lies
/// across it; where the cell across is refined, only the parts of the face
/// against masked descendants are emitted.
pub fn geometry(grid: &HyperTreeGrid) -> Result<PolygonalOutput> {
    crate::cursor::check_traversable(grid)?;
    let mut out = PolygonalOutput::new();
    if grid.dimension() < 3 {
        walk_geometric(grid, |c| {
            if c.is_leaf() {
                let corners: &[usize] = if grid.dimension() == 1 { &[0, 1] } else { &[0, 1, 3, 2] };
                let ids: Vec<u32> = corners
                    .iter()
                    .map(|&k| out.add_point(grid.cell_corner(c.state(), k)))
                    .collect();
                if ids.len() == 2 {
                    out.lines.push([ids[0], ids[1]]);
                } else {
                    out.add_polygon(&ids);
                }
            }
            true
        });
        return Ok(out);
    }
    depth_first(grid, |s: &VonNeumannSupercursor<'_>| {
        if s.is_masked() {
            return false;
        }
        if !s.is_leaf() {
            return true;
        }
        for k in 0..s.cursor_count() {
            if k == s.center_index() {
                continue;
            }
            let offset = cursor_offset_unchecked(NeighborhoodKind::VonNeumann, 3, k);
            let axis = offset.iter().position(|&o| o != 0).expect("face neighbor");
            let up = offset[axis] > 0;
            let n = s.neighbor(k);
            if n.is_masked() {
                emit_face(grid, s.center(), axis, up, up, &mut out);
            } else if !s.neighbor_is_leaf(k) {
                emit_masked_patches(grid, n, axis, up, &mut out);
            }
        }
        true
    })?;
    Ok(out)
}

/// Faces of the masked descendants of `cell` that touch its side facing the
/// emitting leaf (which lies below `cell` along `axis` when `up` is set).
fn emit_masked_patches(grid: &HyperTreeGrid, cell: &CellState, axis: usize, up: bool, out: &mut PolygonalOutput) {
    let f = grid.factor();
    let layer = if up { 0 } else { f - 1 };
    let stride = f.pow(axis as u32);
    for i in 0..grid.child_count() {
        if (i / stride) % f != layer {
            continue;
        }
        let child = grid.cell_child(cell, i).expect("refined cell");
        if child.is_masked() {
            emit_face(grid, &child, axis, !up, up, out);
        } else if !grid.cell_is_leaf(&child) {
            emit_masked_patches(grid, &child, axis, up, out);
        }
    }
}

/// Face of `cell` on its high (`high`) or low side of `axis`, wound so that
/// its normal points along `+axis` when `positive` is set.
fn emit_face(grid: &HyperTreeGrid, cell: &CellState, axis: usize, high: bool, positive: bool, out: &mut PolygonalOutput) {
    let u = (axis + 1) % 3;
    let v = (axis + 2) % 3;
    let base = (high as usize) << axis;
    let mut corners = [base, base | 1 << u, base | 1 << u | 1 << v, base | 1 << v];
    if !positive {
        corners.reverse();
    }
    let ids = corners.map(|k| out.add_point(grid.cell_corner(cell, k)));
    out.add_polygon(&ids);
}
