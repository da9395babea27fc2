//! Native filters. Each one walks the grid with the lightest cursor that
//! gives it the information it needs.

mod axis_cut;
mod clip;
mod contour;
mod depth_limiter;
mod geometry;
mod marching;
mod plane_cutter;
mod points;
mod reflection;
mod threshold;
mod unstructured;

pub use axis_cut::axis_cut;
pub use clip::{axis_clip, ClipMode, Side};
pub use contour::{
    contour, contour_naive, contour_preprocess, contour_preprocess_values, contour_values,
    ContourOptions, SignArrays,
};
pub use depth_limiter::depth_limiter;
pub use geometry::geometry;
pub use marching::{marching_cubes_table, MarchingCubesCase};
pub use plane_cutter::{plane_cutter, CutMode, Plane};
pub use points::cell_centers;
pub use reflection::axis_reflection;
pub use threshold::threshold;
pub use unstructured::{to_unstructured, UnstructuredGrid};

use std::sync::Arc;

use bitvec::vec::BitVec;

use crate::cursor::{Cursor, GridCursor};
use crate::grid::HyperTreeGrid;
use crate::tree::HyperTree;
use crate::Result;

/// Output trees built breadth-first from an input grid, each output vertex
/// remembering the input global index it was copied from.
struct TreeCopy {
    trees: Vec<Option<Arc<HyperTree>>>,
    /// Per output slot, the source global index of every output vertex.
    sources: Vec<Vec<u64>>,
}

/// Finalizes `out` (which holds `copy.trees`) and carries over the mask bits
/// named by `masked` and every input field, both remapped through
/// `copy.sources`.
fn finish_copy(
    mut out: HyperTreeGrid,
    input: &HyperTreeGrid,
    copy: &TreeCopy,
    masked: impl Fn(u64) -> bool,
) -> Result<HyperTreeGrid> {
    out.finalize();
    let total = out.vertex_total() as usize;
    let mut order = vec![0u64; total];
    for (slot, _) in out.trees() {
        let start = out.start_of(slot) as usize;
        for (v, &src) in copy.sources[slot].iter().enumerate() {
            order[start + v] = src;
        }
    }
    if input.has_mask() {
        let mask: BitVec = order.iter().map(|&g| masked(g)).collect();
        out.set_mask(mask)?;
    }
    let names: Vec<String> = input.field_names().map(String::from).collect();
    for name in names {
        let values = input.field(&name)?;
        out.add_field(name, order.iter().map(|&g| values[g as usize]).collect())?;
    }
    Ok(out)
}

/// Post-order pass over every tree with a grid cursor that builds a new
/// mask: leaves failing `keep` are masked, and so is every coarse node whose
/// children all end up masked. Input masking is preserved.
fn mask_leaves<'g>(
    grid: &'g HyperTreeGrid,
    keep: &mut dyn FnMut(&GridCursor<'g>) -> bool,
) -> BitVec {
    fn rec<'g>(c: &GridCursor<'g>, keep: &mut dyn FnMut(&GridCursor<'g>) -> bool, mask: &mut BitVec) -> bool {
        let g = c.global_index().expect("valid cursor") as usize;
        if c.is_masked() {
            return false;
        }
        let visible = if c.is_leaf() {
            keep(c)
        } else {
            let mut any = false;
            for i in 0..c.grid().child_count() {
                any |= rec(&c.child(i).expect("non-leaf cursor"), keep, mask);
            }
            any
        };
        if !visible {
            mask.set(g, true);
        }
        visible
    }
    let mut mask = match grid.mask() {
        Some(m) => m.clone(),
        None => BitVec::repeat(false, grid.vertex_total() as usize),
    };
    for (slot, _) in grid.trees() {
        rec(&GridCursor::at_slot(grid, slot), keep, &mut mask);
    }
    mask
}

/// Copy of `grid` sharing its topology and fields, with `mask` attached.
fn with_mask(grid: &HyperTreeGrid, mask: BitVec) -> Result<HyperTreeGrid> {
    let mut out = grid.clone();
    out.set_mask(mask)?;
    Ok(out)
}

#[inline]
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
